#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace confres {

/// Domain error carrying a module-qualified code, e.g. "ahp/NonReciprocal".
/// The CLI surfaces these verbatim as structured diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string code, const std::string& message)
        : std::runtime_error(module + "/" + code + ": " + message),
          module_(std::move(module)),
          code_(std::move(code)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& code() const noexcept { return code_; }
    std::string qualified_code() const { return module_ + "/" + code_; }

private:
    std::string module_;
    std::string code_;
};

}  // namespace confres
