#pragma once

#include <string>

#include "tmpidan/graph.hpp"
#include "tmpidan/workspace.hpp"

#include <json.hpp>

namespace tmpidan {

// Parse error carrying the 1-based line/column of the offending byte.
class ScenarioParseError : public std::runtime_error {
public:
    ScenarioParseError(const std::string& msg, int line, int column)
        : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " +
                             std::to_string(column)),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_ = 0;
    int column_ = 0;
};

nlohmann::json scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const nlohmann::json& j);

std::string scenario_to_string(const Scenario& sc);
Scenario scenario_from_string(const std::string& text);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

// Graph templates (structure only; bindings are code).
nlohmann::json graph_to_json(const AndOrGraph& g);
AndOrGraph graph_from_json(const nlohmann::json& j);

}  // namespace tmpidan
