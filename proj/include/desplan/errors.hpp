/*
 * Copyright 2026 The desplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DESPLAN_ERRORS_HPP
#define DESPLAN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace desplan {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unknown state or event identifiers passed to a query.
class InputError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid models: nondeterminism, controllability conflicts,
/// dangling references.
class ModelError : public Error {
public:
    using Error::Error;
};

class ParseError : public ModelError {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : ModelError("line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A firing that would overtake a scheduled completion, or an event that
/// never occurs.
class FeasibilityError : public Error {
public:
    FeasibilityError(std::string event, const std::string& what)
        : Error(what), event_(std::move(event)) {}

    /// The pending event whose completion would have been overtaken (or the
    /// offending event itself when its delay is infinite).
    const std::string& event() const { return event_; }

private:
    std::string event_;
};

class PlanningError : public Error {
public:
    PlanningError(std::size_t deepest, const std::string& what)
        : Error(what), deepest_(deepest) {}

    std::size_t deepest_depth() const { return deepest_; }

private:
    std::size_t deepest_;
};

/// A configured node or frontier budget was exhausted.
class ResourceError : public Error {
public:
    using Error::Error;
};

class SimulationError : public Error {
public:
    using Error::Error;
};

} // namespace desplan

#endif // DESPLAN_ERRORS_HPP
