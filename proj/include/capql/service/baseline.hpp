#pragma once

#include <string>

#include "capql/backend.hpp"

namespace capql::library {

/// Reference implementation of the five endpoints with the access policy
/// hard-coded into direct SQL. Used as the behavioral oracle for the
/// contract-enforced endpoints and as the benchmark baseline.
///
/// `card` is the caller's card id; outputs are byte-identical to the
/// contracted endpoints' outputs for every (user, payload) pair.
struct BaselineEndpoints {
    static std::string reserve(Connection& conn, std::int64_t card, const std::string& book);
    static std::string my_reservations(Connection& conn, std::int64_t card);
    static std::string remove_reservation(Connection& conn, std::int64_t card,
                                          const std::string& r_id);
    static std::string search_author(Connection& conn, const std::string& fname,
                                     const std::string& lname);
    static std::string num_reservations(Connection& conn, const std::string& book);
};

} // namespace capql::library
