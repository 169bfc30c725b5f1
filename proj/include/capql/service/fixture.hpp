#pragma once

#include <memory>
#include <string>

#include "capql/backend.hpp"

namespace capql::library {

/// Lending-library schema: cardholders, authors, books, reservations, with
/// foreign keys books.author -> authors, reservations.book -> books and
/// reservations.cardholder_id -> cardholders.
void create_schema(Connection& conn);

/// Seed rows: two cardholders (Steve Martin, Richard Pryor), two authors
/// (Trevor Noah, Tina Fey), two books (Born a Crime, Bossypants), and two
/// reservations, both held by card 2.
void seed_data(Connection& conn);

/// Schema plus seed on a fresh file database (overwrites).
void create_fixture_db(const std::string& path);

/// Schema plus seed in memory.
std::shared_ptr<Connection> fixture_memory_db();

} // namespace capql::library
