#pragma once

#include <stdexcept>
#include <string>

namespace rgbspeckle {

/// Exception carrying the name of the module that raised it, so the CLI can
/// print a one-line `error[module]: message` diagnostic.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

} // namespace rgbspeckle
