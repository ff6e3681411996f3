#include "qrbm/experiment.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "qrbm/attribute_classify.hpp"
#include "qrbm/errors.hpp"
#include "qrbm/evaluation.hpp"
#include "qrbm/matrix_io.hpp"

namespace qrbm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* mode_name(Mode m)
{
    switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::train: return "train";
    case Mode::cv: return "cv";
    case Mode::evaluate: return "evaluate";
    case Mode::classify: return "classify";
    case Mode::compare: return "compare";
    }
    return "?";
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed)
{
    if (!obj.is_object())
        throw ConfigError(where + " must be an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

double get_real(const json& obj, const std::string& key, const std::string& where)
{
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

std::uint64_t get_uint(const json& obj, const std::string& key, const std::string& where)
{
    const json& v = obj.at(key);
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    throw ConfigError(where + "." + key + " must be a non-negative integer");
}

bool get_bool(const json& obj, const std::string& key, const std::string& where)
{
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw ConfigError(where + "." + key + " must be true or false");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where)
{
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

std::vector<double> get_grid(const json& obj, const std::string& key, const std::string& where)
{
    const json& v = obj.at(key);
    if (!v.is_array())
        throw ConfigError(where + "." + key + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number())
            throw ConfigError(where + "." + key + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

CdmSpec parse_model(const json& obj, const std::string& where)
{
    if (!obj.is_object() || !obj.contains("type"))
        throw ConfigError(where + " needs a \"type\"");
    const std::string type = get_string(obj, "type", where);
    if (type == "dina" || type == "dino") {
        check_keys(obj, where, {"type", "g", "s"});
        const double g = obj.contains("g") ? get_real(obj, "g", where) : 0.1;
        const double s = obj.contains("s") ? get_real(obj, "s", where) : 0.1;
        return type == "dina" ? CdmSpec{Dina{g, s}} : CdmSpec{Dino{g, s}};
    }
    if (type == "acdm" || type == "gdina") {
        check_keys(obj, where, {"type", "delta0", "p"});
        const double d0 = obj.contains("delta0") ? get_real(obj, "delta0", where) : 0.1;
        const double p = obj.contains("p") ? get_real(obj, "p", where) : 0.9;
        return type == "acdm" ? CdmSpec{Acdm{d0, p}} : CdmSpec{Gdina{d0, p}};
    }
    if (type == "mixture") {
        check_keys(obj, where, {"type", "components"});
        if (!obj.contains("components") || !obj.at("components").is_array())
            throw ConfigError(where + ".components must be an array");
        Mixture mix;
        std::size_t i = 0;
        for (const auto& c : obj.at("components")) {
            const std::string cw = where + ".components[" + std::to_string(i++) + "]";
            check_keys(c, cw, {"weight", "model"});
            if (!c.contains("weight") || !c.contains("model"))
                throw ConfigError(cw + " needs \"weight\" and \"model\"");
            mix.components.push_back({parse_model(c.at("model"), cw + ".model"),
                                      get_real(c, "weight", cw)});
        }
        return mix;
    }
    throw ConfigError(where + ".type '" + type +
                      "' is not one of dina, dino, acdm, gdina, mixture");
}

void parse_simulation(const json& obj, SimulationConfig& sim)
{
    const std::string w = "simulation";
    check_keys(obj, w, {"N", "K", "rho", "q_design", "model"});
    if (obj.contains("N"))
        sim.N = get_uint(obj, "N", w);
    if (obj.contains("K"))
        sim.K = get_uint(obj, "K", w);
    if (obj.contains("rho"))
        sim.rho = get_real(obj, "rho", w);
    if (obj.contains("q_design")) {
        const auto d = get_string(obj, "q_design", w);
        if (d == "structured")
            sim.q_design = QDesign::structured;
        else if (d == "random")
            sim.q_design = QDesign::random;
        else
            throw ConfigError("simulation.q_design must be \"structured\" or \"random\"");
    }
    if (obj.contains("model"))
        sim.model = parse_model(obj.at("model"), w + ".model");
}

void parse_trainer(const json& obj, TrainerConfig& t, const fs::path& base)
{
    const std::string w = "trainer";
    check_keys(obj, w,
               {"K", "lambda", "gamma0", "batch_size", "epochs", "lr_schedule",
                "normalize_w_update", "warm_start_q"});
    if (obj.contains("K"))
        t.n_attributes = get_uint(obj, "K", w);
    if (obj.contains("lambda"))
        t.lambda = get_real(obj, "lambda", w);
    if (obj.contains("gamma0"))
        t.gamma0 = get_real(obj, "gamma0", w);
    if (obj.contains("batch_size"))
        t.batch_size = get_uint(obj, "batch_size", w);
    if (obj.contains("epochs"))
        t.n_epochs = get_uint(obj, "epochs", w);
    if (obj.contains("lr_schedule")) {
        const auto s = get_string(obj, "lr_schedule", w);
        if (s == "per_epoch")
            t.lr_schedule = LrSchedule::per_epoch;
        else if (s == "per_iteration")
            t.lr_schedule = LrSchedule::per_iteration;
        else
            throw ConfigError("trainer.lr_schedule must be \"per_epoch\" or \"per_iteration\"");
    }
    if (obj.contains("normalize_w_update"))
        t.normalize_w_update = get_bool(obj, "normalize_w_update", w);
    if (obj.contains("warm_start_q")) {
        const fs::path q = resolve(base, get_string(obj, "warm_start_q", w));
        if (!fs::exists(q))
            throw IoError("input file not found: " + q.string());
        t.init = WarmStartInit{read_binary_matrix(q)};
    }
}

void parse_cv(const json& obj, CvConfig& cv)
{
    const std::string w = "cv";
    check_keys(obj, w, {"folds", "lambda_grid", "gamma0_grid", "validation_epochs"});
    if (obj.contains("folds"))
        cv.folds = get_uint(obj, "folds", w);
    if (obj.contains("lambda_grid"))
        cv.lambda_grid = get_grid(obj, "lambda_grid", w);
    if (obj.contains("gamma0_grid"))
        cv.gamma0_grid = get_grid(obj, "gamma0_grid", w);
    if (obj.contains("validation_epochs"))
        cv.validation_epochs = get_uint(obj, "validation_epochs", w);
}

void parse_inputs(const json& obj, ExperimentInputs& in, const fs::path& base)
{
    const std::string w = "inputs";
    check_keys(obj, w,
               {"responses", "q_hat", "q_true", "q_reference", "weights", "visible_bias",
                "hidden_bias", "attributes", "trace"});
    auto take = [&](const char* key, std::optional<fs::path>& slot) {
        if (obj.contains(key))
            slot = resolve(base, get_string(obj, key, w));
    };
    take("responses", in.responses);
    take("q_hat", in.q_hat);
    take("q_true", in.q_true);
    take("q_reference", in.q_reference);
    take("weights", in.weights);
    take("visible_bias", in.visible_bias);
    take("hidden_bias", in.hidden_bias);
    take("attributes", in.attributes);
    take("trace", in.trace);
}

const fs::path& require(const std::optional<fs::path>& p, const char* key, Mode mode)
{
    if (!p)
        throw ConfigError(std::string("mode '") + mode_name(mode) + "' requires inputs." + key);
    if (!fs::exists(*p))
        throw IoError(std::string("input file not found: ") + p->string() + " (inputs." + key +
                      ")");
    return *p;
}

Vector read_vector(const fs::path& path)
{
    const Matrix m = read_matrix(path);
    if (m.cols() == 1)
        return m.col(0);
    if (m.rows() == 1)
        return m.row(0).transpose();
    throw InvalidArgument(path.string() + " is " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected a vector");
}

// Last mean_batch_error of a trace.csv written by the train command.
double read_final_trace_value(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string() + " for reading");
    std::string header;
    std::getline(in, header);
    if (header.rfind("epoch,mean_batch_error", 0) != 0)
        throw ParseError(path.string() + ":1: expected header epoch,mean_batch_error");
    std::stringstream rest;
    rest << in.rdbuf();
    const Matrix m = parse_matrix(rest.str(), path.string());
    if (m.cols() != 2)
        throw ParseError(path.string() + ": expected 2 columns");
    return m(m.rows() - 1, 1);
}

std::string join_ints(const std::vector<int>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0)
            out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

Report error_report(const ErrorReport& e)
{
    return {{"oe", format_double(e.oe)},
            {"otp", format_double(e.otp)},
            {"otn", format_double(e.otn)},
            {"permutation", join_ints(e.permutation)}};
}

class Writer {
public:
    explicit Writer(fs::path dir) : dir_(std::move(dir))
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_))
            throw IoError("cannot create output directory " + dir_.string());
    }

    template <typename M>
    void matrix(const char* name, const M& m)
    {
        write_matrix(m, next(name));
    }
    void vector(const char* name, const Vector& v) { write_matrix(Matrix(v), next(name)); }
    void text(const char* name, const std::string& s) { write_text(s, next(name)); }
    void report(const char* name, const Report& r) { write_report(r, next(name)); }

    std::vector<fs::path> written;

private:
    fs::path next(const char* name)
    {
        written.push_back(dir_ / name);
        return written.back();
    }

    fs::path dir_;
};

void write_params(Writer& out, const RbmParams& p)
{
    out.matrix("W.csv", p.W);
    out.vector("b.csv", p.b);
    out.vector("c.csv", p.c);
}

} // namespace

std::vector<double> default_lambda_grid()
{
    std::vector<double> g;
    for (int i = 3; i <= 15; ++i)
        g.push_back(i / 1000.0);
    return g;
}

std::vector<double> default_gamma0_grid()
{
    std::vector<double> g;
    for (int i = 1; i <= 11; ++i)
        g.push_back(i / 2.0);
    return g;
}

ExperimentConfig parse_config(std::string_view json_text, const fs::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(doc, "config",
               {"mode", "seed", "threads", "simulation", "trainer", "cv", "inputs", "compare",
                "classify"});

    ExperimentConfig cfg;
    cfg.cv.lambda_grid = default_lambda_grid();
    cfg.cv.gamma0_grid = default_gamma0_grid();

    if (!doc.contains("mode"))
        throw ConfigError("config needs a \"mode\"");
    const std::string mode = get_string(doc, "mode", "config");
    const std::pair<const char*, Mode> modes[] = {
        {"simulate", Mode::simulate}, {"train", Mode::train},       {"cv", Mode::cv},
        {"evaluate", Mode::evaluate}, {"classify", Mode::classify}, {"compare", Mode::compare}};
    bool found = false;
    for (const auto& [name, m] : modes)
        if (mode == name) {
            cfg.mode = m;
            found = true;
        }
    if (!found)
        throw ConfigError("unknown mode '" + mode + "'");

    if (doc.contains("seed"))
        cfg.seed = get_uint(doc, "seed", "config");
    if (doc.contains("threads"))
        cfg.threads = get_uint(doc, "threads", "config");
    if (doc.contains("simulation"))
        parse_simulation(doc.at("simulation"), cfg.simulation);
    if (doc.contains("trainer"))
        parse_trainer(doc.at("trainer"), cfg.trainer, base_dir);
    if (doc.contains("cv"))
        parse_cv(doc.at("cv"), cfg.cv);
    if (doc.contains("inputs"))
        parse_inputs(doc.at("inputs"), cfg.inputs, base_dir);
    if (doc.contains("compare")) {
        check_keys(doc.at("compare"), "compare", {"match_columns"});
        if (doc.at("compare").contains("match_columns"))
            cfg.compare_match_columns = get_bool(doc.at("compare"), "match_columns", "compare");
    }
    if (doc.contains("classify")) {
        const json& c = doc.at("classify");
        check_keys(c, "classify", {"threshold", "orient"});
        if (c.contains("threshold"))
            cfg.classify_threshold = get_real(c, "threshold", "classify");
        if (c.contains("orient"))
            cfg.classify_orient = get_bool(c, "orient", "classify");
    }
    return cfg;
}

SimulationConfig parse_simulation_config(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("simulation config is not valid JSON: ") + e.what());
    }
    SimulationConfig sim;
    parse_simulation(doc, sim);
    return sim;
}

ExperimentConfig load_config(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::vector<fs::path> run_experiment(const ExperimentConfig& config, const fs::path& out_dir)
{
    if (!config.seed)
        throw ConfigError("a seed is required (config \"seed\" or --seed)");
    if (config.threads == 0)
        throw ConfigError("threads must be at least 1");
    const std::uint64_t seed = *config.seed;
    const Mode mode = config.mode;
    const ExperimentInputs& in = config.inputs;

    // Resolve and load every input before touching the output directory.
    switch (mode) {
    case Mode::simulate: {
        const SimulatedData d = simulate(config.simulation, seed);
        Writer out(out_dir);
        out.matrix("Q.csv", d.Q);
        out.matrix("A.csv", d.A);
        out.matrix("R.csv", d.R);
        return out.written;
    }
    case Mode::train: {
        const ResponseMatrix R = read_binary_matrix(require(in.responses, "responses", mode));
        TrainerConfig t = config.trainer;
        t.seed = seed;
        const TrainResult res = train(R, t);
        std::string trace = "epoch,mean_batch_error\n";
        for (std::size_t e = 0; e < res.error_trace.size(); ++e)
            trace += std::to_string(e + 1) + "," + format_double(res.error_trace[e]) + "\n";
        Writer out(out_dir);
        write_params(out, res.params);
        out.text("trace.csv", trace);
        return out.written;
    }
    case Mode::cv: {
        const ResponseMatrix R = read_binary_matrix(require(in.responses, "responses", mode));
        CvConfig cv = config.cv;
        cv.trainer = config.trainer;
        cv.seed = seed;
        cv.threads = config.threads;
        const CvResult res = cv_select(R, cv);
        std::string csv = "lambda,gamma0,fold,val_error,sparsity\n";
        for (const auto& r : res.records)
            csv += format_double(r.lambda) + "," + format_double(r.gamma0) + "," +
                   std::to_string(r.fold) + "," + format_double(r.val_error) + "," +
                   format_double(r.sparsity) + "\n";
        Writer out(out_dir);
        out.text("cv_report.csv", csv);
        out.matrix("Q_hat.csv", res.q);
        write_params(out, res.debiased);
        out.report("report.txt", {{"lambda_star", format_double(res.lambda_star)},
                                  {"gamma0_star", format_double(res.gamma0_star)},
                                  {"fold_star", std::to_string(res.fold_star)},
                                  {"val_error", format_double(res.val_error)}});
        return out.written;
    }
    case Mode::evaluate: {
        const QMatrix q_hat = read_binary_matrix(require(in.q_hat, "q_hat", mode));
        const QMatrix q_true = read_binary_matrix(require(in.q_true, "q_true", mode));
        std::optional<double> mbe;
        if (in.trace)
            mbe = read_final_trace_value(require(in.trace, "trace", mode));
        ErrorReport e = q_errors(q_hat, q_true, true);
        Report r = error_report(e);
        if (mbe)
            r.emplace_back("mean_batch_error", format_double(*mbe));
        Writer out(out_dir);
        out.report("report.txt", r);
        return out.written;
    }
    case Mode::classify: {
        const Matrix W = read_matrix(require(in.weights, "weights", mode));
        const Vector b = read_vector(require(in.visible_bias, "visible_bias", mode));
        const Vector c = read_vector(require(in.hidden_bias, "hidden_bias", mode));
        const ResponseMatrix R = read_binary_matrix(require(in.responses, "responses", mode));
        std::optional<AttributeMatrix> a_true;
        if (in.attributes)
            a_true = read_binary_matrix(require(in.attributes, "attributes", mode));
        RbmParams params(W, b, c);
        if (config.classify_orient)
            params = orient_hidden_units(params);
        const AttributeMatrix a_hat = classify_attributes(params, R, config.classify_threshold);
        std::optional<Vector> scores;
        if (a_true)
            scores = acc(a_hat, *a_true);
        Writer out(out_dir);
        out.matrix("A_hat.csv", a_hat);
        if (scores) {
            std::string csv = "attribute,acc\n";
            for (Eigen::Index k = 0; k < scores->size(); ++k)
                csv += std::to_string(k + 1) + "," + format_double((*scores)[k]) + "\n";
            out.text("acc.csv", csv);
            out.report("report.txt", {{"mean_acc", format_double(scores->mean())}});
        }
        return out.written;
    }
    case Mode::compare: {
        const QMatrix q_hat = read_binary_matrix(require(in.q_hat, "q_hat", mode));
        const QMatrix q_ref = read_binary_matrix(require(in.q_reference, "q_reference", mode));
        const ErrorReport e = q_errors(q_hat, q_ref, config.compare_match_columns);
        Writer out(out_dir);
        out.report("report.txt", error_report(e));
        return out.written;
    }
    }
    throw ConfigError("unhandled mode");
}

} // namespace qrbm
