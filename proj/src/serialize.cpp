#include "ncbasis/serialize.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace ncbasis {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return json(x).dump();
}

double parse_alpha(const std::string& text, double* one_minus_alpha) {
    const auto slash = text.find('/');
    double alpha, oma;
    if (slash != std::string::npos) {
        const double num = std::stod(text.substr(0, slash));
        const double den = std::stod(text.substr(slash + 1));
        if (!(den > 0.0)) throw std::domain_error("alpha fraction: positive denominator required");
        alpha = num / den;
        oma = (den - num) / den;
    } else {
        size_t pos = 0;
        alpha = std::stod(text, &pos);
        if (pos != text.size()) throw std::domain_error("bad alpha literal: " + text);
        oma = 1.0 - alpha;
    }
    if (!(alpha > 0.0) || !(alpha <= 0.5))
        throw std::domain_error("alpha must lie in (0, 1/2]; got " + text);
    if (one_minus_alpha) *one_minus_alpha = oma;
    return alpha;
}

namespace {

double json_to_double(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        char* end = nullptr;
        const double x = std::strtod(s.c_str(), &end);  // handles hex-float literals
        if (end == s.c_str() || *end != '\0')
            throw std::invalid_argument("bad numeric literal: " + s);
        return x;
    }
    throw std::invalid_argument("expected number or numeric string");
}

}  // namespace

json matrix_to_json(const Mat& x) {
    json data = json::array();
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            data.push_back({x(i, j).real(), x(i, j).imag()});
    return json{{"dim", x.rows()}, {"data", std::move(data)}};
}

Mat matrix_from_json(const json& j) {
    const Eigen::Index n = j.at("dim").get<Eigen::Index>();
    if (n < 1) throw std::invalid_argument("matrix json: dim >= 1 required");
    const json& data = j.at("data");
    if (Eigen::Index(data.size()) != n * n)
        throw std::invalid_argument("matrix json: data must hold dim^2 entries");
    Mat x(n, n);
    Eigen::Index idx = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index jj = 0; jj < n; ++jj, ++idx) {
            const json& e = data[size_t(idx)];
            if (!e.is_array() || e.size() != 2)
                throw std::invalid_argument("matrix json: entries are [re, im] pairs");
            x(i, jj) = Complex(json_to_double(e[0]), json_to_double(e[1]));
        }
    return x;
}

json weight_to_json(const Weight& w) {
    return json{{"alpha", w.alpha()},
                {"one_minus_alpha", w.one_minus_alpha()},
                {"level", w.level()}};
}

Weight weight_from_json(const json& j) {
    double alpha, oma;
    const json& a = j.at("alpha");
    if (a.is_string()) {
        alpha = parse_alpha(a.get<std::string>(), &oma);
    } else {
        alpha = a.get<double>();
        oma = 1.0 - alpha;
    }
    if (j.contains("one_minus_alpha")) oma = j.at("one_minus_alpha").get<double>();
    return Weight(alpha, oma, j.at("level").get<int>());
}

json haar_to_json(const HaarSystem& sys) {
    json quads = json::array();
    for (const RademacherQuad& q : sys.quads()) {
        json quad = json::array();
        for (int j = 0; j < 4; ++j) quad.push_back(matrix_to_json(q.r(j)));
        quads.push_back(std::move(quad));
    }
    return json{{"side", side_name(sys.side())},
                {"alpha", sys.alpha()},
                {"one_minus_alpha", sys.one_minus_alpha()},
                {"level", sys.level()},
                {"quads", std::move(quads)}};
}

HaarSystem haar_from_json(const json& j) {
    const Side side = side_parse(j.at("side").get<std::string>());
    double alpha, oma;
    const json& a = j.at("alpha");
    if (a.is_string()) {
        alpha = parse_alpha(a.get<std::string>(), &oma);
    } else {
        alpha = a.get<double>();
        oma = 1.0 - alpha;
    }
    if (j.contains("one_minus_alpha")) oma = j.at("one_minus_alpha").get<double>();
    const int level = j.at("level").get<int>();
    const json& quads = j.at("quads");
    if (int(quads.size()) != level)
        throw std::invalid_argument("haar json: one quad per level required");
    std::vector<RademacherQuad> qs;
    qs.reserve(size_t(level));
    for (const json& quad : quads) {
        if (!quad.is_array() || quad.size() != 4)
            throw std::invalid_argument("haar json: quads hold 4 matrices each");
        std::array<Mat, 4> r{matrix_from_json(quad[0]), matrix_from_json(quad[1]),
                             matrix_from_json(quad[2]), matrix_from_json(quad[3])};
        qs.emplace_back(std::move(r), alpha, oma, side);  // revalidates the Gram condition
    }
    return HaarSystem(std::move(qs));
}

std::string measure_to_csv(const MeasureTable& table) {
    std::ostringstream out;
    out << "k,k/2^nu,mass\n";
    const double n = double(std::uint64_t(1) << table.level);
    for (size_t k = 0; k < table.masses.size(); ++k)
        out << k << ',' << format_double(double(k) / n) << ','
            << format_double(table.masses[k]) << '\n';
    return out.str();
}

namespace {

void append_row_fields(std::ostringstream& out, const NormReportRow& r) {
    out << format_double(r.alpha) << ',' << r.level << ',' << r.p.str() << ','
        << side_name(r.norm_side) << ',' << r.m << ',' << format_double(r.estimate) << ','
        << format_double(r.bound) << ',' << method_name(r.method) << ',' << r.samples << ','
        << r.seed << ',' << (r.pass ? "true" : "false");
}

}  // namespace

std::string report_to_csv(const NormReport& report, const json* config) {
    std::ostringstream out;
    if (config) out << "# config " << config->dump() << '\n';
    out << "# suite " << report.suite << " system_side " << side_name(report.system_side)
        << " bound_kind " << report.bound_kind << " tolerance "
        << format_double(report.tolerance) << '\n';
    for (const std::string& note : report.notes) out << "# note " << note << '\n';
    out << "alpha,level,p,side,m,estimate,bound,method,samples,seed,pass\n";
    for (const NormReportRow& r : report.rows) {
        append_row_fields(out, r);
        out << '\n';
    }
    return out.str();
}

json report_to_json(const NormReport& report, const json* config) {
    json rows = json::array();
    for (const NormReportRow& r : report.rows) {
        json row{{"alpha", r.alpha},
                 {"level", r.level},
                 {"p", r.p.str()},
                 {"side", side_name(r.norm_side)},
                 {"m", r.m},
                 {"estimate", std::isnan(r.estimate) ? json() : json(r.estimate)},
                 {"bound", r.bound},
                 {"method", method_name(r.method)},
                 {"samples", r.samples},
                 {"seed", r.seed},
                 {"pass", r.pass},
                 {"counted", r.counted}};
        if (!r.error.empty()) row["error"] = r.error;
        rows.push_back(std::move(row));
    }
    json out{{"suite", report.suite},
             {"system_side", side_name(report.system_side)},
             {"bound_kind", report.bound_kind},
             {"tolerance", report.tolerance},
             {"notes", report.notes},
             {"rows", std::move(rows)}};
    if (config) out["config"] = *config;
    return out;
}

}  // namespace ncbasis
