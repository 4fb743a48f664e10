#pragma once

#include "intmat/asymptotics.hpp"
#include "intmat/budget.hpp"
#include "intmat/count_record.hpp"
#include "intmat/exact_counts.hpp"
#include "intmat/integer.hpp"
#include "intmat/linalg.hpp"
#include "intmat/matrix.hpp"
#include "intmat/monte_carlo.hpp"
#include "intmat/parallel.hpp"
#include "intmat/polynomial.hpp"
#include "intmat/product_distribution.hpp"
#include "intmat/properties.hpp"
#include "intmat/random.hpp"

namespace intmat {
inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kSchema = "intmat-lab/1";
}  // namespace intmat
