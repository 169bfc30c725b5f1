#include "capql/authority.hpp"

#include <fstream>
#include <vector>

#include "capql/error.hpp"

namespace capql {

namespace {

std::string strip(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

RootAuthority RootAuthority::from_config(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        throw IoError("cannot read config file: " + config_path);
    }
    RootAuthority auth;
    std::string line;
    while (std::getline(in, line)) {
        std::string entry = strip(line);
        if (entry.empty() || entry[0] == '#') continue;
        auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw IoError("malformed config line (expected name=path): " + entry);
        }
        auth.attach(strip(entry.substr(0, eq)), strip(entry.substr(eq + 1)));
    }
    return auth;
}

RootAuthority RootAuthority::open(const std::string& db_name, const std::string& path) {
    RootAuthority auth;
    auth.attach(db_name, path);
    return auth;
}

RootAuthority RootAuthority::adopt(const std::string& db_name,
                                   std::shared_ptr<Connection> conn) {
    RootAuthority auth;
    auth.adopt_connection(db_name, std::move(conn));
    return auth;
}

void RootAuthority::attach(const std::string& db_name, const std::string& path) {
    databases_[db_name] = Connection::open(path);
}

void RootAuthority::adopt_connection(const std::string& db_name,
                                     std::shared_ptr<Connection> conn) {
    databases_[db_name] = std::move(conn);
}

const std::shared_ptr<Connection>& RootAuthority::connection(
    const std::string& db_name) const {
    auto it = databases_.find(db_name);
    if (it == databases_.end()) {
        throw IoError("no database named '" + db_name + "' attached to this authority");
    }
    return it->second;
}

ViewPtr make_view(const RootAuthority& auth, const std::string& db_name,
                  const std::string& table) {
    const auto& conn = auth.connection(db_name);
    ViewSchema schema = conn->table_schema(table);
    if (schema.columns.empty()) {
        throw UnknownTable(table);
    }
    return detail_mint_raw_view(Query::base(table, std::move(schema)), conn);
}

namespace {

thread_local std::vector<std::string> t_user_stack;

} // namespace

std::string current_user() {
    if (t_user_stack.empty()) {
        throw NoUserContext();
    }
    return t_user_stack.back();
}

namespace detail {

UserScope::UserScope(std::string user) {
    t_user_stack.push_back(std::move(user));
}

UserScope::~UserScope() {
    t_user_stack.pop_back();
}

} // namespace detail

} // namespace capql
