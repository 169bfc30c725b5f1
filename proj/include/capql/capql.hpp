#pragma once

// Umbrella header for the capability-based database access library.

#include "capql/authority.hpp"
#include "capql/backend.hpp"
#include "capql/contract.hpp"
#include "capql/error.hpp"
#include "capql/expr.hpp"
#include "capql/parser.hpp"
#include "capql/query.hpp"
#include "capql/schema.hpp"
#include "capql/value.hpp"
#include "capql/view.hpp"
