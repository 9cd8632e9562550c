#pragma once

#include <functional>
#include <string>
#include <vector>

namespace umig::detail {

/// `base` if unused, else the first free `base_1`, `base_2`, ...; a suffix
/// adds a warning.
inline std::string unique_name(const std::string& base, const std::function<bool(const std::string&)>& taken,
                               std::vector<std::string>& warnings, const std::string& context) {
    if (!taken(base)) return base;
    for (int i = 1;; ++i) {
        std::string n = base + "_" + std::to_string(i);
        if (!taken(n)) {
            warnings.push_back(context + ": name '" + base + "' is taken, using '" + n + "'");
            return n;
        }
    }
}

}  // namespace umig::detail
