// kforr.hpp
// Umbrella header.

#pragma once

#include "kforr/classify.hpp"
#include "kforr/datagen.hpp"
#include "kforr/error.hpp"
#include "kforr/forrelation.hpp"
#include "kforr/qstate.hpp"
#include "kforr/verify.hpp"
