#pragma once

#include "qmet/cem.hpp"
#include "qmet/diff.hpp"
#include "qmet/errors.hpp"
#include "qmet/evolution.hpp"
#include "qmet/fisher.hpp"
#include "qmet/matcore.hpp"
#include "qmet/models.hpp"
#include "qmet/phasesim.hpp"
#include "qmet/properties.hpp"
#include "qmet/random.hpp"

namespace qmet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qmet
