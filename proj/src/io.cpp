#include "forestlab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace forestlab {

namespace {

Json vector_to_json(const Eigen::VectorXd& v) {
    Json arr = Json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Json coords_to_json(const std::vector<long long>& v) {
    Json arr = Json::array();
    for (long long c : v) arr.push_back(c);
    return arr;
}

Eigen::VectorXd json_to_vector(const Json& arr, const char* what) {
    if (!arr.is_array() || arr.empty())
        throw ValidationError(std::string(what) + " must be a nonempty array");
    Eigen::VectorXd v(static_cast<int>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw ValidationError(std::string(what) + " entries must be numbers");
        v[static_cast<int>(i)] = arr[i].get<double>();
    }
    return v;
}

Matrix parse_matrix(const Json& m) {
    if (m.is_string()) {
        if (m.get<std::string>() == "honeycomb") return honeycomb_matrix();
        throw ValidationError("unknown matrix preset: " + m.get<std::string>());
    }
    if (!m.is_array() || m.empty())
        throw ValidationError("matrix must be an array of rows");
    const int n = static_cast<int>(m.size());
    Eigen::MatrixXd num(n, n);
    RationalMatrix exact;
    exact.n = n;
    exact.a.assign(static_cast<size_t>(n) * n, Rational(0));
    for (int i = 0; i < n; ++i) {
        const Json& row = m[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ValidationError("matrix must be square");
        for (int j = 0; j < n; ++j) {
            const Json& e = row[static_cast<size_t>(j)];
            Rational r;
            if (e.is_string())
                r = parse_rational(e.get<std::string>());
            else if (e.is_number())
                r = Rational(e.get<double>());
            else
                throw ValidationError("matrix entries must be numbers or fractions");
            exact.at(i, j) = r;
            num(i, j) = to_double(r);
        }
    }
    return Matrix(num, exact);
}

Forest preset_forest(const std::string& name) {
    if (name == "honeycomb")
        return Forest({GridSpec(honeycomb_matrix(), Eigen::VectorXd::Zero(2))});
    if (name == "square")
        return Forest({GridSpec(Matrix::identity(2), Eigen::VectorXd::Zero(2))});
    if (name == "square-pair") {
        Eigen::VectorXd half(2);
        half << 0.5, 0.5;
        return Forest({GridSpec(Matrix::identity(2), Eigen::VectorXd::Zero(2)),
                       GridSpec(Matrix::identity(2), half)});
    }
    throw ValidationError("unknown forest preset: " + name);
}

}  // namespace

Matrix honeycomb_matrix() {
    Eigen::MatrixXd num(2, 2);
    num << 1.0, 0.5, 0.0, 0.8660254037844386;
    RationalMatrix exact;
    exact.n = 2;
    exact.a = {Rational(1), Rational(1, 2), Rational(0),
               Rational(0.8660254037844386)};
    return Matrix(num, exact);
}

Forest parse_forest(const Json& doc) {
    if (doc.is_string()) return preset_forest(doc.get<std::string>());
    if (!doc.is_object() || !doc.contains("grids"))
        throw ValidationError("forest document needs a grids array");
    const Json& gs = doc["grids"];
    if (!gs.is_array() || gs.empty())
        throw ValidationError("grids must be a nonempty array");
    std::vector<GridSpec> grids;
    for (const auto& g : gs) {
        if (!g.is_object() || !g.contains("matrix"))
            throw ValidationError("each grid needs a matrix");
        Matrix m = parse_matrix(g["matrix"]);
        Eigen::VectorXd shift = Eigen::VectorXd::Zero(m.n());
        if (g.contains("translation"))
            shift = json_to_vector(g["translation"], "translation");
        if (shift.size() != m.n())
            throw ValidationError("translation dimension mismatch");
        grids.emplace_back(std::move(m), std::move(shift));
    }
    Forest forest(std::move(grids));
    if (doc.contains("dimension") &&
        doc["dimension"].get<int>() != forest.dim())
        throw ValidationError("declared dimension disagrees with the matrices");
    return forest;
}

Forest load_forest(const std::string& path_or_preset) {
    if (std::filesystem::exists(path_or_preset))
        return parse_forest(read_json_file(path_or_preset));
    return preset_forest(path_or_preset);
}

Json forest_to_json(const Forest& forest) {
    Json out;
    out["dimension"] = forest.dim();
    Json gs = Json::array();
    for (const auto& g : forest.grids) {
        Json one;
        Json rows = Json::array();
        for (int i = 0; i < g.dim(); ++i) {
            Json row = Json::array();
            for (int j = 0; j < g.dim(); ++j) row.push_back(g.basis.numeric()(i, j));
            rows.push_back(row);
        }
        one["matrix"] = rows;
        one["translation"] = vector_to_json(g.shift);
        gs.push_back(one);
    }
    out["grids"] = gs;
    return out;
}

Json verdict_to_json(const ForestVerdict& verdict) {
    Json out;
    bool negative = verdict.status == ForestVerdict::Status::NotDenseForest;
    out["status"] = negative ? "not-dense-forest" : "no-obstruction-up-to";
    out["height"] = verdict.height;
    out["tolerance"] = verdict.tolerance;
    if (negative) {
        out["exact"] = verdict.exact;
        out["residual"] = verdict.residual;
        Json ws = Json::array();
        for (const auto& w : verdict.witnesses) ws.push_back(coords_to_json(w));
        out["witnesses"] = ws;
        out["common_direction"] = vector_to_json(verdict.common_direction);
    }
    return out;
}

Json density_to_json(const DensityReport& report) {
    Json out;
    out["dense"] = report.dense;
    out["certified"] = report.certified;
    out["resolution"] = report.resolution;
    out["farthest_point"] = vector_to_json(report.farthest_point);
    out["farthest_distance"] = report.farthest_distance;
    out["boxes_processed"] = report.boxes_processed;
    out["truncated"] = report.truncated;
    return out;
}

Json filling_to_json(const FillingTime& fill) {
    Json out;
    out["infinite"] = fill.infinite;
    if (!fill.infinite) out["value"] = fill.value;
    if (fill.obstruction) {
        Json w;
        w["coeffs"] = coords_to_json(fill.obstruction->coeffs);
        w["residual"] = fill.obstruction->residual;
        out["obstruction"] = w;
    }
    return out;
}

Json cover_to_json(const CapCover& cover) {
    Json out;
    out["d"] = cover.d;
    out["eta"] = cover.eta;
    out["count"] = cover.centres.size();
    out["c_cover"] = cover.c_cover;
    if (cover.verified_max_gap >= 0.0)
        out["verified_max_gap"] = cover.verified_max_gap;
    Json cs = Json::array();
    for (const auto& c : cover.centres) cs.push_back(vector_to_json(c));
    out["centres"] = cs;
    return out;
}

Json witness_to_json(const HitWitness& witness) {
    Json out;
    out["grid"] = witness.grid_index;
    out["coords"] = coords_to_json(witness.coords);
    out["point"] = vector_to_json(witness.point);
    return out;
}

Json visibility_to_json(const VisibilityOutcome& outcome) {
    Json out;
    out["hit"] = outcome.hit;
    out["half_length"] = outcome.half_length;
    if (outcome.witness) out["witness"] = witness_to_json(*outcome.witness);
    return out;
}

ExperimentManifest parse_manifest(const Json& doc) {
    if (!doc.is_object()) throw ValidationError("manifest must be an object");
    ExperimentManifest m;
    m.d = doc.value("d", m.d);
    m.k = doc.value("k", m.k);
    m.mode = doc.value("mode", m.mode);
    if (doc.contains("base"))
        for (const auto& b : doc["base"]) m.base.push_back(parse_matrix(b));
    if (doc.contains("levels")) m.levels = doc["levels"].get<std::vector<int>>();
    m.samples = doc.value("samples", m.samples);
    m.anchors = doc.value("anchors", m.anchors);
    m.seed = doc.value("seed", m.seed);
    m.relation_height = doc.value("relation_height", m.relation_height);
    m.relation_tol = doc.value("relation_tol", m.relation_tol);
    m.lambda_target = doc.value("lambda_target", m.lambda_target);
    m.direction_range_scale = doc.value("direction_range_scale", m.direction_range_scale);
    m.cap_radius_scale = doc.value("cap_radius_scale", m.cap_radius_scale);
    m.direction_budget = doc.value("direction_budget", m.direction_budget);
    m.budget_factor = doc.value("budget_factor", m.budget_factor);
    m.unipotent_box = doc.value("unipotent_box", m.unipotent_box);
    m.cell_budget = doc.value("cell_budget", m.cell_budget);
    m.out_dir = doc.value("out_dir", m.out_dir);
    m.validate();
    return m;
}

Json manifest_to_json(const ExperimentManifest& manifest) {
    Json out;
    out["d"] = manifest.d;
    out["k"] = manifest.k;
    out["mode"] = manifest.mode;
    if (!manifest.base.empty()) {
        Json bs = Json::array();
        for (const auto& b : manifest.base) {
            Json rows = Json::array();
            for (int i = 0; i < b.n(); ++i) {
                Json row = Json::array();
                for (int j = 0; j < b.n(); ++j) row.push_back(b.numeric()(i, j));
                rows.push_back(row);
            }
            bs.push_back(rows);
        }
        out["base"] = bs;
    }
    out["levels"] = manifest.levels;
    out["samples"] = manifest.samples;
    out["anchors"] = manifest.anchors;
    out["seed"] = manifest.seed;
    out["relation_height"] = manifest.relation_height;
    out["relation_tol"] = manifest.relation_tol;
    out["lambda_target"] = manifest.lambda_target;
    out["lambda_resolved"] = manifest.lambda();
    out["direction_range_scale"] = manifest.direction_range_scale;
    out["cap_radius_scale"] = manifest.cap_radius_scale;
    out["direction_budget"] = manifest.direction_budget;
    out["budget_factor"] = manifest.budget_factor;
    out["unipotent_box"] = manifest.unipotent_box;
    out["cell_budget"] = manifest.cell_budget;
    out["out_dir"] = manifest.out_dir;
    return out;
}

Json summary_to_json(const ExperimentResult& result) {
    Json out;
    out["manifest"] = manifest_to_json(result.manifest);
    out["sigma"] = result.sigma;
    out["lambda"] = result.lambda;
    out["valid_slopes"] = result.valid_slopes;
    out["slope_min"] = result.slope_min;
    out["slope_median"] = result.slope_median;
    out["slope_max"] = result.slope_max;
    out["pass_rate_upper"] = result.pass_rate_upper;
    out["pass_rate_lower"] = result.pass_rate_lower;
    Json samples = Json::array();
    for (const auto& rec : result.samples) {
        Json s;
        s["sample_id"] = rec.sample_id;
        s["checker"] = rec.checker_status;
        s["slope"] = rec.slope;
        s["intercept"] = rec.intercept;
        s["slope_valid"] = rec.slope_valid;
        if (!rec.error.empty()) s["error"] = rec.error;
        Json rows = Json::array();
        for (const auto& row : rec.rows) {
            Json r;
            r["level"] = row.level;
            r["epsilon"] = row.epsilon;
            r["v_hat"] = row.v_hat;
            r["blocked"] = row.blocked;
            r["formula_radius"] = row.formula_radius;
            r["effective_radius"] = row.effective_radius;
            r["directions"] = row.directions;
            rows.push_back(r);
        }
        s["rows"] = rows;
        samples.push_back(s);
    }
    out["samples"] = samples;
    return out;
}

namespace {

std::string join_vector(const Eigen::VectorXd& v) {
    std::string s;
    for (int i = 0; i < v.size(); ++i) {
        if (i > 0) s += ';';
        s += format_double(v[i]);
    }
    return s;
}

std::string join_coords(const std::vector<long long>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ';';
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

std::string experiment_csv(const ExperimentResult& result) {
    std::ostringstream os;
    os << "# " << manifest_to_json(result.manifest).dump() << "\n";
    os << "sample_id,level,epsilon,v_hat,blocked,formula_radius,effective_radius,"
          "directions,checker,slope,slope_valid,worst_anchor,worst_direction,"
          "worst_grid,worst_coords\n";
    for (const auto& rec : result.samples) {
        for (const auto& row : rec.rows) {
            os << rec.sample_id << ',' << row.level << ','
               << format_double(row.epsilon) << ',' << format_double(row.v_hat)
               << ',' << (row.blocked ? 1 : 0) << ','
               << format_double(row.formula_radius) << ','
               << format_double(row.effective_radius) << ',' << row.directions
               << ',' << rec.checker_status << ',' << format_double(rec.slope)
               << ',' << (rec.slope_valid ? 1 : 0) << ','
               << join_vector(row.worst_anchor) << ','
               << join_vector(row.worst_direction) << ','
               << row.worst_witness.grid_index << ','
               << join_coords(row.worst_witness.coords) << '\n';
        }
    }
    return os.str();
}

void persist_experiment(const ExperimentResult& result) {
    if (result.manifest.out_dir.empty())
        throw ValidationError("no output directory configured");
    std::filesystem::create_directories(result.manifest.out_dir);
    auto dir = std::filesystem::path(result.manifest.out_dir);
    // Raw rows land before the aggregate so a crash cannot leave a summary
    // without its provenance.
    write_text_file((dir / "raw.csv").string(), experiment_csv(result));
    write_text_file((dir / "summary.json").string(),
                    summary_to_json(result).dump(2) + "\n");
}

std::string format_double(double x) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    Json doc;
    try {
        in >> doc;
    } catch (const Json::parse_error& e) {
        throw ValidationError("invalid JSON in " + path + ": " + e.what());
    }
    return doc;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << text;
    if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace forestlab
