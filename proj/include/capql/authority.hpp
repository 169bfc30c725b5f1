#pragma once

#include <map>
#include <memory>
#include <string>

#include "capql/backend.hpp"
#include "capql/view.hpp"

namespace capql {

/// The ambient end of the trust boundary: an opaque token over a set of
/// database connections. Only code holding a RootAuthority can mint base
/// view capabilities; component code receives views, never the token, and
/// no view, row set, or error ever yields one back.
class RootAuthority {
public:
    /// Build from a key=value config file mapping database names to paths.
    /// Lines starting with '#' are comments.
    static RootAuthority from_config(const std::string& config_path);

    /// Single-database authority over an existing file (or `:memory:`).
    static RootAuthority open(const std::string& db_name, const std::string& path);

    /// Adopt an already-open connection under a database name. For entry
    /// code that builds fixtures before minting capabilities.
    static RootAuthority adopt(const std::string& db_name, std::shared_ptr<Connection> conn);

    void attach(const std::string& db_name, const std::string& path);
    void adopt_connection(const std::string& db_name, std::shared_ptr<Connection> conn);

    const std::shared_ptr<Connection>& connection(const std::string& db_name) const;

private:
    RootAuthority() = default;
    std::map<std::string, std::shared_ptr<Connection>> databases_;
};

/// Mint a base view capability for one table: the view contains all of the
/// table's data, like a SELECT * query.
ViewPtr make_view(const RootAuthority& auth, const std::string& db_name,
                  const std::string& table);

/// Innermost user of the dynamic with_user scope.
std::string current_user();

namespace detail {

class UserScope {
public:
    explicit UserScope(std::string user);
    ~UserScope();
    UserScope(const UserScope&) = delete;
    UserScope& operator=(const UserScope&) = delete;
};

} // namespace detail

/// Run `body` with current_user() bound to `user`. Scopes nest; the outer
/// value is restored on exit. Established by trusted entry code only;
/// contract transforms that call current_user() observe the user active at
/// operation time.
template <typename F>
decltype(auto) with_user(const std::string& user, F&& body) {
    detail::UserScope scope(user);
    return std::forward<F>(body)();
}

} // namespace capql
