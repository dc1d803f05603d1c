#pragma once

#include <epicert/constraints.hpp>

#include "latex_forms.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

// Containment of listed constraint families (LaTeX data files) in generated suites.
namespace golden {

using namespace epicert;

inline std::string data(const std::string& name) { return std::string(EPICERT_DATA_DIR) + "/" + name; }

inline std::set<std::string> scalar_keys(const std::vector<Constraint>& cs)
{
    std::set<std::string> keys;
    for (const auto& c : cs) keys.insert(to_string(c.form.normalized(), kMaxDim));
    return keys;
}

// Every map from the letters into [n], plus the fixed index '1' -> 0.
inline std::vector<std::map<char, int>> letter_maps(const std::string& letters, int n)
{
    std::vector<std::map<char, int>> out;
    std::vector<int> v(letters.size(), 0);
    while (true) {
        std::map<char, int> m{{'1', 0}};
        for (std::size_t i = 0; i < letters.size(); ++i) m[letters[i]] = v[i];
        out.push_back(m);
        std::size_t k = 0;
        while (k < v.size() && ++v[k] == n) v[k++] = 0;
        if (k == v.size()) break;
    }
    return out;
}

// None: one form per index map. All: sum over every index map.
// LastLetter: for each choice of the other letters, sum over the last one.
enum class Sum { None, All, LastLetter };

struct Result {
    int total = 0;
    std::vector<std::string> missing;
};

inline Result check(const std::string& file, const std::string& letters, int n, Sum sum,
                    const std::vector<Constraint>& suite)
{
    auto keys = scalar_keys(suite);
    Result r;
    for (const auto& e : latex::load(data(file))) {
        std::vector<DiffForm> forms;
        if (sum == Sum::All) {
            DiffForm s;
            for (const auto& mp : letter_maps(letters, n)) s += latex::parse(e.tex, mp);
            forms.push_back(s);
        } else if (sum == Sum::LastLetter) {
            for (auto mp : letter_maps(letters.substr(0, letters.size() - 1), n)) {
                DiffForm s;
                for (int c = 0; c < n; ++c) {
                    mp[letters.back()] = c;
                    s += latex::parse(e.tex, mp);
                }
                forms.push_back(s);
            }
        } else {
            for (const auto& mp : letter_maps(letters, n)) forms.push_back(latex::parse(e.tex, mp));
        }
        for (const auto& f : forms) {
            if (f.is_zero()) continue;
            ++r.total;
            if (!keys.count(to_string(f.normalized(), kMaxDim))) r.missing.push_back(file + ":" + e.name);
        }
    }
    return r;
}

}  // namespace golden
