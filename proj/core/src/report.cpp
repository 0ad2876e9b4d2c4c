#include "nleq/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "nleq/errors.hpp"

namespace nleq {

using nlohmann::json;

std::string_view to_string(OutputFormat f) noexcept {
    switch (f) {
        case OutputFormat::table: return "table";
        case OutputFormat::csv: return "csv";
        case OutputFormat::json: return "json";
    }
    return "?";
}

OutputFormat parse_output_format(std::string_view name) {
    for (OutputFormat f : {OutputFormat::table, OutputFormat::csv, OutputFormat::json})
        if (name == to_string(f)) return f;
    throw InputError("unknown output format: " + std::string(name));
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

// NaN and infinities have no JSON spelling; they become null
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json jvec(const Vector& v) {
    json a = json::array();
    for (double d : v) a.push_back(jnum(d));
    return a;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

// Fixed-width table: each column as wide as its widest cell.
std::string render(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                   OutputFormat format) {
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_field(cells[i]);
            out << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out.str();
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += "  ";
            s += cells[i] + std::string(width[i] - cells[i].size(), ' ');
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        out << s << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
}

json root_json(const RootResult& r) {
    return {{"termcd", r.termcd}, {"fcnt", r.fcnt},   {"jcnt", r.jcnt},
            {"iter", r.iter},     {"fnorm", jnum(r.fnorm)}, {"message", r.message},
            {"x", jvec(r.x)},     {"fvec", jvec(r.fvec)}};
}

json detail_json(const SolverDetail& d) {
    struct Visitor {
        json operator()(std::monostate) const { return nullptr; }
        json operator()(const RootResult& r) const { return root_json(r); }
        json operator()(const SpectralResult& r) const {
            return {{"ss", jnum(r.ss)}, {"iterations", r.iterations}, {"fevals", r.fevals},
                    {"converged", r.converged}};
        }
        json operator()(const LsqResult& r) const {
            return {{"ss", jnum(r.ss)},           {"jac_evals", r.jac_evals},
                    {"fn_evals", r.fn_evals},     {"iterations", r.iterations},
                    {"singvals", jvec(r.singvals)}, {"gradient", jvec(r.gradient)},
                    {"budget_exhausted", r.budget_exhausted}};
        }
        json operator()(const MinimizeResult& r) const {
            return {{"value", jnum(r.value)}, {"fevals", r.fevals}, {"gevals", r.gevals},
                    {"iterations", r.iterations}, {"converged", r.converged},
                    {"kkt_gradient_norm", jnum(r.kkt_gradient_norm)}};
        }
    };
    return std::visit(Visitor{}, d);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_grid(const GridReport& report, OutputFormat format) {
    if (format == OutputFormat::json) {
        json rows = json::array();
        for (const GridRow& r : report.rows) {
            json j = root_json(r.result);
            j["method"] = to_string(r.method);
            j["global"] = to_string(r.global);
            j["sumsq"] = jnum(2.0 * r.result.fnorm);
            j["wall_us"] = r.wall_us;
            rows.push_back(std::move(j));
        }
        return dump({{"kind", "grid"}, {"problem", report.problem}, {"start", report.start}, {"rows", rows}});
    }
    std::vector<std::vector<std::string>> cells;
    for (const GridRow& r : report.rows) {
        cells.push_back({std::string(to_string(r.method)), std::string(to_string(r.global)),
                         std::to_string(r.result.termcd), std::to_string(r.result.fcnt),
                         std::to_string(r.result.jcnt), std::to_string(r.result.iter),
                         std::string(termcd_message(r.result.termcd)), num(r.result.fnorm)});
    }
    return render({"Method", "Global", "termcd", "Fcnt", "Jcnt", "Iter", "Message", "Fnorm"}, cells, format);
}

std::string format_cascade(const CascadeResult& c, OutputFormat format) {
    if (format == OutputFormat::json) {
        json trace = json::array();
        for (const CascadeAttempt& a : c.trace)
            trace.push_back({{"method", to_string(a.method)}, {"global", to_string(a.global)},
                             {"termcd", a.termcd}, {"sumsq", jnum(a.sumsq)}, {"message", a.message}});
        json j = {{"kind", "cascade"}, {"problem", c.problem}, {"start", c.start}, {"trace", trace}};
        if (c.winner) {
            j["winner"] = {{"method", to_string(c.winner->method)}, {"global", to_string(c.winner->global)}};
            j["sumsq"] = jnum(c.winner->sumsq);
            j["result"] = root_json(*c.result);
        } else {
            j["winner"] = nullptr;
            j["sumsq"] = nullptr;
            j["result"] = nullptr;
        }
        return dump(j);
    }
    std::vector<std::vector<std::string>> cells;
    for (const CascadeAttempt& a : c.trace)
        cells.push_back({std::string(to_string(a.method)), std::string(to_string(a.global)),
                         std::to_string(a.termcd), std::string(termcd_message(a.termcd)), num(a.sumsq)});
    std::string out = render({"Method", "Global", "termcd", "Message", "Sumsq"}, cells, format);
    if (format == OutputFormat::table) {
        if (c.winner)
            out += "winner: " + std::string(to_string(c.winner->method)) + "/" +
                   std::string(to_string(c.winner->global)) + " sumsq=" + num(c.winner->sumsq) + "\n";
        else
            out += "winner: none\n";
    }
    return out;
}

std::string format_comparison(const ComparisonTable& table, OutputFormat format) {
    if (format == OutputFormat::json) {
        json rows = json::array();
        for (const ComparisonRow& r : table.rows) {
            json j = {{"problem", r.problem},     {"start", r.start},
                      {"solver", r.solver},       {"family", to_string(r.family)},
                      {"converged", r.converged}, {"sumsq", jnum(r.sumsq)},
                      {"message", r.message},     {"x", jvec(r.x)},
                      {"wall_us", r.wall_us},     {"detail", detail_json(r.detail)}};
            if (r.timing)
                j["timing"] = {{"reps", r.timing->reps}, {"min_us", r.timing->min_us},
                               {"mean_us", r.timing->mean_us}, {"max_us", r.timing->max_us}};
            rows.push_back(std::move(j));
        }
        return dump({{"kind", "comparison"}, {"rows", rows}});
    }
    bool timed = false;
    for (const ComparisonRow& r : table.rows) timed = timed || r.timing.has_value();
    std::vector<std::string> header = {"Problem", "Start", "Solver", "Converged", "Sumsq", "Message"};
    if (timed) header.insert(header.end(), {"Tmin_us", "Tmean_us", "Tmax_us"});
    std::vector<std::vector<std::string>> cells;
    for (const ComparisonRow& r : table.rows) {
        std::vector<std::string> c = {r.problem, r.start, r.solver, r.converged ? "yes" : "no", num(r.sumsq),
                                      r.message};
        if (timed) {
            if (r.timing) {
                c.insert(c.end(), {num(r.timing->min_us), num(r.timing->mean_us), num(r.timing->max_us)});
            } else {
                c.insert(c.end(), {"", "", ""});
            }
        }
        cells.push_back(std::move(c));
    }
    return render(header, cells, format);
}

std::string format_catalog(const std::vector<CatalogEntry>& catalog, OutputFormat format) {
    if (format == OutputFormat::json) {
        json probs = json::array();
        for (const CatalogEntry& e : catalog)
            probs.push_back({{"name", e.name}, {"n_params", e.n_params}, {"n_residuals", e.n_residuals},
                             {"starts", e.starts}});
        return dump({{"kind", "catalog"}, {"problems", probs}});
    }
    std::vector<std::vector<std::string>> cells;
    for (const CatalogEntry& e : catalog) {
        std::string starts;
        for (const std::string& s : e.starts) starts += (starts.empty() ? "" : " ") + s;
        cells.push_back({e.name, std::to_string(e.n_params), std::to_string(e.n_residuals), starts});
    }
    return render({"Problem", "Params", "Residuals", "Starts"}, cells, format);
}

}  // namespace nleq
