#include "rgbspeckle/eval.hpp"

#include "rgbspeckle/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rgbspeckle::eval {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("eval", msg); }

std::string full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string quote_cell(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// One CSV record; quoted cells may hold commas and doubled quotes.
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cells.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cells.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else {
            cells.back() += c;
        }
    }
    if (quoted) fail("unterminated quote in comparison CSV");
    return cells;
}

} // namespace

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EvalReport evaluate(const DisparityMap& pred, const DisparityMap& gt, const ValidityMask* mask,
                    const EvalOptions& options) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        fail("prediction and ground truth differ in size");
    if (mask && (mask->width() != gt.width() || mask->height() != gt.height()))
        fail("mask differs in size from ground truth");
    if (!(options.threshold > 0.0)) fail("D1 threshold must be positive");

    EvalReport rep;
    rep.threshold = options.threshold;
    rep.penalize_missing = options.penalize_missing;
    rep.error_map = DisparityMap(gt.width(), gt.height());

    std::vector<double> errors;
    errors.reserve(gt.size());
    std::size_t over = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (is_invalid(gt[i]) || (mask && !(*mask)[i])) continue;
        if (is_invalid(pred[i])) {
            ++rep.n_missing;
            continue;
        }
        const double e = std::abs(static_cast<double>(pred[i]) - gt[i]);
        errors.push_back(e);
        rep.error_map[i] = static_cast<float>(e);
        if (e > options.threshold) ++over;
    }
    rep.n_evaluated = errors.size();
    if (rep.n_evaluated == 0) fail("empty evaluation: no pixel is valid in prediction, ground truth and mask");
    rep.epe = pairwise_sum(errors) / static_cast<double>(rep.n_evaluated);
    if (options.penalize_missing)
        rep.d1 = static_cast<double>(over + rep.n_missing) / static_cast<double>(rep.n_evaluated + rep.n_missing);
    else
        rep.d1 = static_cast<double>(over) / static_cast<double>(rep.n_evaluated);
    return rep;
}

ComparisonTable compare_runs(const std::vector<std::pair<std::string, EvalReport>>& reports) {
    ComparisonTable t;
    for (const auto& [label, r] : reports) t.rows.push_back({label, r.epe, r.d1, r.n_evaluated, r.threshold});
    std::stable_sort(t.rows.begin(), t.rows.end(),
                     [](const ComparisonRow& a, const ComparisonRow& b) { return a.label < b.label; });
    return t;
}

std::string ComparisonTable::to_csv() const {
    std::ostringstream os;
    os << "label,epe,d1,d1_percent,n_evaluated,threshold\n";
    for (const auto& r : rows)
        os << quote_cell(r.label) << ',' << full(r.epe) << ',' << full(r.d1) << ',' << full(r.d1 * 100.0) << ','
           << r.n_evaluated << ',' << full(r.threshold) << '\n';
    return os.str();
}

std::string ComparisonTable::to_text() const {
    std::size_t width = 5;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-*s  %10s  %10s  %10s\n", static_cast<int>(width), "label", "EPE(px)",
                  "D1(%)", "pixels");
    os << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-*s  %10.6f  %10.6f  %10zu\n", static_cast<int>(width), r.label.c_str(),
                      r.epe, r.d1 * 100.0, r.n_evaluated);
        os << buf;
    }
    return os.str();
}

ComparisonTable ComparisonTable::parse_csv(const std::string& csv) {
    ComparisonTable t;
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("label,", 0) != 0) fail("comparison CSV lacks header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_record(line);
        if (cells.size() != 6) fail("comparison CSV row has " + std::to_string(cells.size()) + " cells");
        ComparisonRow r;
        r.label = cells[0];
        try {
            r.epe = std::stod(cells[1]);
            r.d1 = std::stod(cells[2]);
            r.n_evaluated = static_cast<std::size_t>(std::stoull(cells[4]));
            r.threshold = std::stod(cells[5]);
        } catch (const std::logic_error&) {
            fail("malformed number in comparison CSV row '" + line + "'");
        }
        t.rows.push_back(r);
    }
    return t;
}

} // namespace rgbspeckle::eval
