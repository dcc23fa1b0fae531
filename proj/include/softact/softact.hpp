#pragma once

#include "softact/characterization.hpp"
#include "softact/config.hpp"
#include "softact/csv.hpp"
#include "softact/error.hpp"
#include "softact/force_model.hpp"
#include "softact/geometry.hpp"
#include "softact/svg.hpp"
#include "softact/synthetic_rig.hpp"
#include "softact/units.hpp"
#include "softact/wearable.hpp"
