#pragma once

#include <map>
#include <string>
#include <vector>

namespace cogload::prompt {

/// Versioned plain-text prompt resources: one file per task, one per level
/// family, plus the judge/paraphrase/meta templates and the placeholder
/// carrier song. Compiled-in defaults are used until a resource directory
/// is loaded; files override keys one by one.
class TemplateStore {
public:
    TemplateStore();  // defaults only

    /// Reads <dir>/<key>.txt for every known key that exists on disk.
    /// Unknown files are ignored; missing files keep the default.
    void load_overrides(const std::string& dir);

    /// Writes every known key to <dir>/<key>.txt (creating directories).
    void dump(const std::string& dir) const;

    const std::string& get(const std::string& key) const;  // throws IoError
    bool has(const std::string& key) const;
    std::vector<std::string> keys() const;

    /// Process-wide store used by compose/render when no explicit store is
    /// passed. Mutating it (load_overrides) is a startup-time operation.
    static TemplateStore& instance();

private:
    std::map<std::string, std::string> entries_;
};

/// Replaces "{KEY}" placeholders; keys absent from `values` are left as-is.
std::string fill_placeholders(std::string tmpl,
                              const std::map<std::string, std::string>& values);

}  // namespace cogload::prompt
