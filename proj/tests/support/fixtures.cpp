#include "support/fixtures.hpp"

namespace testsupport {

void create_student_directory(capql::Connection& conn) {
    conn.execute("CREATE TABLE students ("
                 " id INTEGER PRIMARY KEY,"
                 " name TEXT,"
                 " email TEXT,"
                 " gpa REAL)");
    conn.execute("CREATE TABLE advising ("
                 " student INTEGER,"
                 " advisor TEXT)");
    conn.execute("INSERT INTO students (id, name, email, gpa) VALUES"
                 " (1, 'Mike Birbiglia', 'birbigms@college.edu', 2.5),"
                 " (2, 'Tig Notaro', 'tnotaro@college.edu', 3.9),"
                 " (3, 'Patton Oswalt', 'poswalt@college.edu', 3.4)");
    conn.execute("INSERT INTO advising (student, advisor) VALUES"
                 " (1, 'Jerome Seinfeld'),"
                 " (2, 'Jerome Seinfeld'),"
                 " (3, 'Joan Rivers')");
}

std::shared_ptr<capql::Connection> student_directory_db() {
    auto conn = capql::Connection::open(":memory:");
    create_student_directory(*conn);
    return conn;
}

} // namespace testsupport
