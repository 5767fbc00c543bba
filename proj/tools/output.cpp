#include "output.hpp"

#include <charconv>
#include <sstream>

namespace iob_cli {

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string meta_value(const nlohmann::ordered_json& v)
{
    if (v.is_null()) return "none";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) {
            if (!out.empty()) out += ' ';
            out += meta_value(e);
        }
        return out;
    }
    return v.dump();
}

} // namespace

std::string Document::to_csv() const
{
    std::ostringstream os;
    for (const auto& [k, v] : meta) os << "# " << k << " = " << meta_value(v) << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            os << (row[c] ? format_double(*row[c]) : "none");
        }
        os << '\n';
    }
    return os.str();
}

std::string Document::to_json() const
{
    nlohmann::ordered_json doc;
    auto& m = doc["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) m[k] = v;
    auto& d = doc["data"] = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < columns.size(); ++c) {
        auto col = nlohmann::ordered_json::array();
        for (const auto& row : rows) {
            if (row[c]) {
                col.push_back(*row[c]);
            } else {
                col.push_back(nullptr);
            }
        }
        d[columns[c]] = std::move(col);
    }
    return doc.dump(1) + '\n';
}

} // namespace iob_cli
