#pragma once

#include <memory>

#include <capql/backend.hpp>

namespace testsupport {

/// students/advising: the student directory tables with their three seed
/// rows (Birbiglia 2.5 / Notaro 3.9 / Oswalt 3.4; Seinfeld advises 1 and 2,
/// Rivers advises 3).
void create_student_directory(capql::Connection& conn);

std::shared_ptr<capql::Connection> student_directory_db();

} // namespace testsupport
