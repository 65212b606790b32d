#pragma once

// Umbrella header. io.hpp is left out because it pulls in nlohmann/json.

#include "nlcl/diagnostics.hpp"
#include "nlcl/error.hpp"
#include "nlcl/grid.hpp"
#include "nlcl/harness.hpp"
#include "nlcl/initial_data.hpp"
#include "nlcl/kernels.hpp"
#include "nlcl/quadrature.hpp"
#include "nlcl/reference.hpp"
#include "nlcl/scheme.hpp"
#include "nlcl/velocity.hpp"
#include "nlcl/version.hpp"
