#pragma once

#include <optional>
#include <string>

#include "capql/authority.hpp"
#include "capql/contract.hpp"

namespace capql::library {

/// The five reservation endpoints as contracted functions. Contracts encode
/// each endpoint's policy; the bodies are deliberately ordinary view code
/// and rely on enforcement, not self-discipline.
///
/// Call shapes (current_user() must hold the caller's card id as text):
///   reserve:            {book_id, v_reservations}           -> ack JSON
///   my_reservations:    {v_reservations, v_books, v_authors} -> JSON array
///   remove_reservation: {r_id, v_reservations}               -> ack JSON
///   search_author:      {fname, lname, v_authors, v_books}   -> JSON array
///   num_reservations:   {book_id, v_reservations}            -> count text
struct Endpoints {
    Contracted reserve;
    Contracted my_reservations;
    Contracted remove_reservation;
    Contracted search_author;
    Contracted num_reservations;
};

const Endpoints& endpoints();

/// Trusted entry helper: resolve "firstname lastname" to a card id.
std::optional<std::int64_t> lookup_card_id(Connection& conn, const std::string& full_name);

} // namespace capql::library
