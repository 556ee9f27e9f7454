#pragma once
// Flag and config-file handling for the command-line tool. Config files are
// plain text, one `key = value` per line, `#` starts a comment; command-line
// flags override file values.

#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaselab {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Args {
  public:
    void load_config(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config file " + path);
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string key = trim(line.substr(0, line.find('=')));
            if (key.empty()) {
                if (!trim(line).empty())
                    throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
            file_values_[key] = trim(line.substr(eq + 1));
        }
    }

    // flags: --key value (or --key=value); returns positional arguments
    std::vector<std::string> parse_flags(int argc, char** argv, int first) {
        std::vector<std::string> positional;
        for (int i = first; i < argc; ++i) {
            std::string a = argv[i];
            if (a.rfind("--", 0) != 0) {
                positional.push_back(a);
                continue;
            }
            a.erase(0, 2);
            const std::size_t eq = a.find('=');
            if (eq != std::string::npos) {
                flag_values_[a.substr(0, eq)] = a.substr(eq + 1);
            } else {
                if (i + 1 >= argc) throw UsageError("flag --" + a + " expects a value");
                flag_values_[a] = argv[++i];
            }
        }
        return positional;
    }

    bool has(const std::string& key) const {
        return flag_values_.count(key) || file_values_.count(key);
    }

    std::string get(const std::string& key, const std::string& fallback = "") const {
        auto it = flag_values_.find(key);
        if (it != flag_values_.end()) return it->second;
        it = file_values_.find(key);
        if (it != file_values_.end()) return it->second;
        return fallback;
    }

    double get_double(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        try {
            return std::stod(get(key));
        } catch (const std::exception&) {
            throw UsageError("flag --" + key + ": expected a number, got '" + get(key) + "'");
        }
    }

    long get_long(const std::string& key, long fallback) const {
        if (!has(key)) return fallback;
        try {
            return std::stol(get(key));
        } catch (const std::exception&) {
            throw UsageError("flag --" + key + ": expected an integer, got '" + get(key) + "'");
        }
    }

  private:
    static std::string trim(std::string s) {
        const char* ws = " \t\r\n";
        const std::size_t a = s.find_first_not_of(ws);
        if (a == std::string::npos) return "";
        const std::size_t b = s.find_last_not_of(ws);
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::string> flag_values_;
    std::map<std::string, std::string> file_values_;
};

} // namespace phaselab
