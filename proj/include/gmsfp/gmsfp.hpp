#pragma once

// Everything except the JSON layer (gmsfp/io.hpp), which needs nlohmann/json.

#include "gmsfp/contractions.hpp"
#include "gmsfp/control.hpp"
#include "gmsfp/dynprog.hpp"
#include "gmsfp/errors.hpp"
#include "gmsfp/gms.hpp"
#include "gmsfp/iteration.hpp"
#include "gmsfp/mapping.hpp"
#include "gmsfp/oracle.hpp"
#include "gmsfp/random.hpp"
#include "gmsfp/rational.hpp"
#include "gmsfp/scalar.hpp"
#include "gmsfp/space.hpp"
