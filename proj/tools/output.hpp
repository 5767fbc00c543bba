#ifndef IOB_TOOLS_OUTPUT_HPP
#define IOB_TOOLS_OUTPUT_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace iob_cli {

using Cell = std::optional<double>; // nullopt renders as "none" / null

/// A metadata block plus column-oriented numeric data.
struct Document
{
    std::vector<std::pair<std::string, nlohmann::ordered_json>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void set(std::string key, nlohmann::ordered_json value)
    {
        meta.emplace_back(std::move(key), std::move(value));
    }

    std::string to_csv() const;
    std::string to_json() const;
};

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

} // namespace iob_cli

#endif
