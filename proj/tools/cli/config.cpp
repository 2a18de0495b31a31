#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "hitrun/errors.hpp"

namespace hitrun::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Reads one JSON object, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class Reader {
  public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    [[noreturn]] static void fail(const std::string& where, const std::string& what) {
        throw ConfigError((where.empty() ? std::string("config") : where) + ": " + what);
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    double real(const std::string& key, double def, double lo = -kInf, double hi = kInf, bool open_lo = false) {
        if (!has(key)) return def;
        return real_value(j_.at(key), at(key), lo, hi, open_lo);
    }

    std::optional<double> opt_real(const std::string& key, double lo = -kInf, double hi = kInf, bool open_lo = false) {
        if (!has(key)) return std::nullopt;
        return real_value(j_.at(key), at(key), lo, hi, open_lo);
    }

    std::uint64_t count(const std::string& key, std::uint64_t def, std::uint64_t lo = 0,
                        std::uint64_t hi = std::numeric_limits<std::uint64_t>::max()) {
        if (!has(key)) return def;
        return count_value(j_.at(key), at(key), lo, hi);
    }

    int integer(const std::string& key, int def, int lo, int hi) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) fail(at(key), "expected an integer");
        const auto x = v.get<std::int64_t>();
        if (x < lo || x > hi) fail(at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return static_cast<int>(x);
    }

    bool boolean(const std::string& key, bool def) {
        if (!has(key)) return def;
        if (!j_.at(key).is_boolean()) fail(at(key), "expected true or false");
        return j_.at(key).get<bool>();
    }

    std::string choice(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed) {
        if (!has(key)) return def;
        if (!j_.at(key).is_string()) fail(at(key), "expected a string");
        const auto s = j_.at(key).get<std::string>();
        std::string list;
        for (const char* a : allowed) {
            if (s == a) return s;
            list += std::string(list.empty() ? "" : ", ") + a;
        }
        fail(at(key), "unknown value \"" + s + "\" (allowed: " + list + ")");
    }

    std::vector<double> reals(const std::string& key, std::vector<double> def, double lo = -kInf, double hi = kInf) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_array()) fail(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(real_value(v[i], at(key) + "[" + std::to_string(i) + "]", lo, hi, false));
        }
        return out;
    }

    std::vector<std::uint64_t> counts(const std::string& key, std::vector<std::uint64_t> def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_array()) fail(at(key), "expected an array of integers");
        std::vector<std::uint64_t> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(count_value(v[i], at(key) + "[" + std::to_string(i) + "]", 0,
                                      std::numeric_limits<std::uint64_t>::max()));
        }
        return out;
    }

    /// Sub-object; an absent key reads as an empty object.
    Reader sub(const std::string& key) {
        static const json empty = json::object();
        return Reader(has(key) ? j_.at(key) : empty, at(key));
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    /// Throws on any key that was never asked for.
    void done() const {
        for (const auto& [k, _] : j_.items()) {
            if (!seen_.count(k)) fail(at(k), "unknown key");
        }
    }

  private:
    static double real_value(const json& v, const std::string& where, double lo, double hi, bool open_lo) {
        if (!v.is_number()) fail(where, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(where, "must be finite");
        if (open_lo ? !(x > lo) : !(x >= lo)) fail(where, std::string("must be ") + (open_lo ? "> " : ">= ") + num(lo));
        if (!(x <= hi)) fail(where, "must be <= " + num(hi));
        return x;
    }

    static std::uint64_t count_value(const json& v, const std::string& where, std::uint64_t lo, std::uint64_t hi) {
        if (!v.is_number_unsigned()) fail(where, "expected a nonnegative integer");
        const auto x = v.get<std::uint64_t>();
        if (x < lo || x > hi) fail(where, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return x;
    }

    static std::string num(double x) {
        std::ostringstream os;
        os << x;
        return os.str();
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require_size(const std::vector<double>& v, std::size_t n, const std::string& where) {
    if (v.size() != n) {
        Reader::fail(where, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    }
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

constexpr int kMaxDim = 4096;

BodyConfig parse_body(Reader r) {
    BodyConfig b;
    b.kind = r.choice("kind", "box", {"ball", "box", "cube", "isotropic_cube", "simplex", "hpolytope", "ellipsoid"});
    if (b.kind == "ball") {
        b.center = r.reals("center", {0.0, 0.0});
        b.radius = r.real("radius", 1.0, 0.0, kInf, true);
        b.dim = static_cast<int>(b.center.size());
    } else if (b.kind == "box") {
        // The default is the isotropic square [-sqrt 3, sqrt 3]^2.
        b.lower = r.reals("lower", {-std::sqrt(3.0), -std::sqrt(3.0)});
        b.upper = r.reals("upper", std::vector<double>(b.lower.size(), std::sqrt(3.0)));
        require_size(b.upper, b.lower.size(), r.at("upper"));
        for (std::size_t i = 0; i < b.lower.size(); ++i) {
            if (!(b.lower[i] < b.upper[i])) Reader::fail(r.at("upper"), "each upper entry must exceed lower");
        }
        b.dim = static_cast<int>(b.lower.size());
    } else if (b.kind == "cube" || b.kind == "isotropic_cube" || b.kind == "simplex") {
        b.dim = r.integer("dim", 2, 1, kMaxDim);
        if (b.kind == "cube") b.half_width = r.real("half_width", 1.0, 0.0, kInf, true);
        if (b.kind == "simplex") b.scale = r.real("scale", 1.0, 0.0, kInf, true);
    } else if (b.kind == "hpolytope") {
        if (!r.has("offsets") || !r.has("rows") || !r.has("interior")) {
            Reader::fail(r.at("kind"), "hpolytope needs rows, offsets and interior");
        }
        b.interior = r.reals("interior", {});
        b.offsets = r.reals("offsets", {});
        b.rows = r.reals("rows", {});
        b.dim = static_cast<int>(b.interior.size());
        require_size(b.rows, b.offsets.size() * b.interior.size(), r.at("rows"));
    } else {
        b.center = r.reals("center", {0.0, 0.0});
        b.dim = static_cast<int>(b.center.size());
        const std::size_t n = b.center.size();
        std::vector<double> identity(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) identity[i * n + i] = 1.0;
        b.shape = r.reals("shape", identity);
        require_size(b.shape, n * n, r.at("shape"));
    }
    if (b.dim < 1 || b.dim > kMaxDim) Reader::fail(r.at("kind"), "dimension must lie in [1, 4096]");
    b.r_inscribed = r.opt_real("r_inscribed", 0.0, kInf, true);
    b.R_circum = r.opt_real("R_circum", 0.0, kInf, true);
    r.done();
    return b;
}

TargetConfig parse_target(Reader r, int dim) {
    TargetConfig t;
    t.kind = r.choice("kind", "uniform", {"uniform", "truncated_gaussian"});
    if (t.kind == "truncated_gaussian") {
        t.beta = r.reals("beta", std::vector<double>(static_cast<std::size_t>(dim), 0.0));
        require_size(t.beta, static_cast<std::size_t>(dim), r.at("beta"));
        t.m = r.real("m", 1.0, 0.0, kInf, true);
    }
    r.done();
    return t;
}

ChainSection parse_chain(Reader r) {
    ChainSection c;
    c.kind = r.choice("kind", "hit_and_run", {"hit_and_run", "ball_walk", "exact_resample"});
    if (c.kind == "ball_walk") c.delta = r.real("delta", 0.1, 0.0, kInf, true);
    c.lazy = r.boolean("lazy", false);
    c.max_chord_retries = r.integer("max_chord_retries", 16, 1, 1'000'000);
    r.done();
    return c;
}

PartitionConfig parse_partition(Reader r, int dim) {
    PartitionConfig p;
    std::vector<double> axis(static_cast<std::size_t>(dim), 0.0);
    axis[0] = 1.0;
    p.normal = r.reals("normal", axis);
    require_size(p.normal, static_cast<std::size_t>(dim), r.at("normal"));
    double norm2 = 0.0;
    for (double v : p.normal) norm2 += v * v;
    if (!(norm2 > 0.0)) Reader::fail(r.at("normal"), "must be nonzero");
    p.offset = r.opt_real("offset");
    r.done();
    return p;
}

}  // namespace

const std::vector<std::string>& verify_check_ids() {
    static const std::vector<std::string> ids = {"kernel_tv", "covariance_bl", "sl_martingale", "cT_law",
                                                 "F_u_bound", "K_r_mass",       "logconcave_suite", "lipschitz_1d"};
    return ids;
}

ExperimentConfig parse_config(const json& j) {
    Reader root(j, "");
    ExperimentConfig c;
    c.seed = root.count("seed", 1);
    c.threads = static_cast<unsigned>(root.count("threads", 1, 1, 1024));
    c.body = parse_body(root.sub("body"));
    const int n = c.body.dim;
    c.target = parse_target(root.sub("target"), n);
    c.chain = parse_chain(root.sub("chain"));

    {
        Reader r = root.sub("sample");
        c.sample.n_steps = r.count("n_steps", 1000);
        c.sample.thin = r.count("thin", 1, 1);
        c.sample.init = r.reals("init", {});
        if (!c.sample.init.empty()) require_size(c.sample.init, static_cast<std::size_t>(n), r.at("init"));
        r.done();
    }
    {
        Reader r = root.sub("sl");
        auto& s = c.sl;
        s.mode = r.choice("mode", "body", {"body", "one_d"});
        s.T = r.real("T", 4.0, 0.0, kInf, true);
        s.h = r.opt_real("h", 0.0, kInf, true);
        s.n_paths = r.count("n_paths", 16, 1);
        s.inner_budget = r.count("inner_budget", 256, 1);
        s.inner_burn_in = r.count("inner_burn_in", 64);
        s.checkpoints = r.reals("checkpoints", {s.T}, 0.0, s.T);
        if (!std::is_sorted(s.checkpoints.begin(), s.checkpoints.end())) {
            Reader::fail(r.at("checkpoints"), "must be sorted");
        }
        s.event_axis = r.integer("event_axis", 0, 0, n - 1);
        s.event_threshold = r.opt_real("event_threshold");
        Reader o = r.sub("one_d");
        s.one_d.density = o.choice("density", "uniform", {"uniform", "gaussian", "laplace"});
        s.one_d.cells = o.count("cells", 4096, 64, 1u << 22);
        s.one_d.alpha = o.real("alpha", 1.0, 0.0, kInf, true);
        s.one_d.sigma2 = o.real("sigma2", 1.0, 0.0, kInf, true);
        s.one_d.n_paths = o.count("n_paths", 40, 1);
        s.one_d.n_steps = o.count("n_steps", 1000, 1);
        o.done();
        r.done();
    }
    {
        Reader r = root.sub("mix");
        auto& m = c.mix;
        m.checkpoints = r.counts("checkpoints", m.checkpoints);
        if (m.checkpoints.empty()) Reader::fail(r.at("checkpoints"), "must not be empty");
        if (std::adjacent_find(m.checkpoints.begin(), m.checkpoints.end(), std::greater_equal<>()) !=
            m.checkpoints.end()) {
            Reader::fail(r.at("checkpoints"), "must increase strictly");
        }
        m.n_replicas = r.count("n_replicas", 1000, 1000);
        m.init = r.choice("init", "warm", {"warm", "center"});
        m.warm_M = r.real("warm_M", 2.0, 1.0);
        m.epsilon = r.real("epsilon", 0.1, 0.0, 1.0, true);
        m.n_bins = r.integer("n_bins", 20, 2, 100'000);
        m.n_bootstrap = r.count("n_bootstrap", 100);
        m.conductance_samples = r.count("conductance_samples", 0);
        m.s = r.real("s", 0.1, 0.0, 0.5, false);
        m.partition = parse_partition(r.sub("partition"), n);
        r.done();
    }
    {
        Reader r = root.sub("conductance");
        auto& k = c.conductance;
        k.partition = parse_partition(r.sub("partition"), n);
        k.s = r.real("s", 0.1, 0.0, 0.5);
        k.n_samples = r.count("n_samples", 2000, 1);
        k.M = r.real("M", 2.0, 1.0);
        k.N = r.real("N", 1000.0, 0.0);
        r.done();
    }
    {
        Reader r = root.sub("logconcave");
        auto& l = c.logconcave;
        l.deltas = r.reals("deltas", l.deltas, 0.0, 1.0 / std::exp(1.0));
        for (double d : l.deltas) {
            if (!(d > 0.0)) Reader::fail(r.at("deltas"), "entries must be > 0");
        }
        l.t_max = r.real("t_max", 10.0, 0.0);
        l.t_step = r.real("t_step", 0.25, 0.0, kInf, true);
        r.done();
    }
    {
        Reader r = root.sub("verify");
        auto& v = c.verify;
        v.kernel_samples = r.count("kernel_samples", v.kernel_samples, 1);
        v.kernel_grid = r.integer("kernel_grid", v.kernel_grid, 2, 1000);
        v.cov_m = r.real("cov_m", v.cov_m, 0.0, kInf, true);
        v.cov_steps = r.count("cov_steps", v.cov_steps, 1000);
        v.sl_paths = r.count("sl_paths", v.sl_paths, 2);
        v.sl_T = r.real("sl_T", v.sl_T, 0.0, kInf, true);
        v.ct_paths = r.count("ct_paths", v.ct_paths, 2);
        v.f_u_points = r.count("f_u_points", v.f_u_points, 1);
        v.f_u_samples = r.count("f_u_samples", v.f_u_samples, 2);
        v.k_r_radius = r.real("k_r_radius", v.k_r_radius, 0.0, kInf, true);
        v.k_r_samples = r.count("k_r_samples", v.k_r_samples, 1);
        v.lipschitz_pairs = r.count("lipschitz_pairs", v.lipschitz_pairs, 1);
        v.grid_cells = r.count("grid_cells", v.grid_cells, 64, 1u << 22);
        if (r.has("bounds")) {
            Reader b(r.raw("bounds"), r.at("bounds"));
            const auto& ids = verify_check_ids();
            for (const auto& [k, _] : r.raw("bounds").items()) {
                if (std::find(ids.begin(), ids.end(), k) == ids.end()) Reader::fail(b.at(k), "unknown check id");
                v.bounds[k] = b.real(k, 0.0);
            }
        }
        r.done();
    }
    root.done();

    // Building the body here surfaces invalid geometry as a parse error.
    try {
        (void)build_body(c.body);
    } catch (const Error& e) {
        Reader::fail("body", e.what());
    }
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, false);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

json partition_json(const PartitionConfig& p) {
    json j = {{"normal", p.normal}};
    if (p.offset) j["offset"] = *p.offset;
    return j;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    json body = {{"kind", c.body.kind}};
    const auto& b = c.body;
    if (b.kind == "ball") {
        body["center"] = b.center;
        body["radius"] = b.radius;
    } else if (b.kind == "box") {
        body["lower"] = b.lower;
        body["upper"] = b.upper;
    } else if (b.kind == "cube" || b.kind == "isotropic_cube" || b.kind == "simplex") {
        body["dim"] = b.dim;
        if (b.kind == "cube") body["half_width"] = b.half_width;
        if (b.kind == "simplex") body["scale"] = b.scale;
    } else if (b.kind == "hpolytope") {
        body["rows"] = b.rows;
        body["offsets"] = b.offsets;
        body["interior"] = b.interior;
    } else {
        body["center"] = b.center;
        body["shape"] = b.shape;
    }
    if (b.r_inscribed) body["r_inscribed"] = *b.r_inscribed;
    if (b.R_circum) body["R_circum"] = *b.R_circum;

    json target = {{"kind", c.target.kind}};
    if (c.target.kind == "truncated_gaussian") {
        target["beta"] = c.target.beta;
        target["m"] = c.target.m;
    }

    json chain = {{"kind", c.chain.kind}, {"lazy", c.chain.lazy}, {"max_chord_retries", c.chain.max_chord_retries}};
    if (c.chain.kind == "ball_walk") chain["delta"] = c.chain.delta;

    json sample = {{"n_steps", c.sample.n_steps}, {"thin", c.sample.thin}};
    if (!c.sample.init.empty()) sample["init"] = c.sample.init;

    const auto& s = c.sl;
    json sl = {{"mode", s.mode},
               {"T", s.T},
               {"n_paths", s.n_paths},
               {"inner_budget", s.inner_budget},
               {"inner_burn_in", s.inner_burn_in},
               {"checkpoints", s.checkpoints},
               {"event_axis", s.event_axis},
               {"one_d",
                {{"density", s.one_d.density},
                 {"cells", s.one_d.cells},
                 {"alpha", s.one_d.alpha},
                 {"sigma2", s.one_d.sigma2},
                 {"n_paths", s.one_d.n_paths},
                 {"n_steps", s.one_d.n_steps}}}};
    if (s.h) sl["h"] = *s.h;
    if (s.event_threshold) sl["event_threshold"] = *s.event_threshold;

    const auto& m = c.mix;
    json mix = {{"checkpoints", m.checkpoints},
                {"n_replicas", m.n_replicas},
                {"init", m.init},
                {"warm_M", m.warm_M},
                {"epsilon", m.epsilon},
                {"n_bins", m.n_bins},
                {"n_bootstrap", m.n_bootstrap},
                {"conductance_samples", m.conductance_samples},
                {"s", m.s},
                {"partition", partition_json(m.partition)}};

    const auto& k = c.conductance;
    json conductance = {{"partition", partition_json(k.partition)},
                        {"s", k.s},
                        {"n_samples", k.n_samples},
                        {"M", k.M},
                        {"N", k.N}};

    json logconcave = {{"deltas", c.logconcave.deltas},
                       {"t_max", c.logconcave.t_max},
                       {"t_step", c.logconcave.t_step}};

    const auto& v = c.verify;
    json verify = {{"kernel_samples", v.kernel_samples}, {"kernel_grid", v.kernel_grid},
                   {"cov_m", v.cov_m},                   {"cov_steps", v.cov_steps},
                   {"sl_paths", v.sl_paths},             {"sl_T", v.sl_T},
                   {"ct_paths", v.ct_paths},             {"f_u_points", v.f_u_points},
                   {"f_u_samples", v.f_u_samples},       {"k_r_radius", v.k_r_radius},
                   {"k_r_samples", v.k_r_samples},       {"lipschitz_pairs", v.lipschitz_pairs},
                   {"grid_cells", v.grid_cells}};
    if (!v.bounds.empty()) verify["bounds"] = v.bounds;

    return json{{"seed", c.seed},
                {"threads", c.threads},
                {"body", body},
                {"target", target},
                {"chain", chain},
                {"sample", sample},
                {"sl", sl},
                {"mix", mix},
                {"conductance", conductance},
                {"logconcave", logconcave},
                {"verify", verify}};
}

ConvexBody build_body(const BodyConfig& b) {
    ConvexBody body = [&] {
        if (b.kind == "ball") return ConvexBody::ball(to_vector(b.center), b.radius);
        if (b.kind == "box") return ConvexBody::box(to_vector(b.lower), to_vector(b.upper));
        if (b.kind == "cube") return ConvexBody::cube(b.dim, b.half_width);
        if (b.kind == "isotropic_cube") return ConvexBody::isotropic_cube(b.dim);
        if (b.kind == "simplex") return ConvexBody::simplex(b.dim, b.scale);
        if (b.kind == "hpolytope") {
            const auto rows = static_cast<Eigen::Index>(b.offsets.size());
            Matrix A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                b.rows.data(), rows, b.dim);
            return ConvexBody::hpolytope(std::move(A), to_vector(b.offsets), to_vector(b.interior));
        }
        Matrix S = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            b.shape.data(), b.dim, b.dim);
        return ConvexBody::ellipsoid(to_vector(b.center), std::move(S));
    }();
    if (b.r_inscribed || b.R_circum) body = body.with_hints(b.r_inscribed, b.R_circum);
    return body;
}

Target build_target(const ExperimentConfig& c, std::shared_ptr<const ConvexBody> body) {
    if (c.target.kind == "uniform") return Target::uniform(std::move(body));
    return Target::truncated_gaussian(std::move(body), to_vector(c.target.beta), c.target.m);
}

ChainConfig build_chain(const ChainSection& s) {
    ChainConfig c;
    c.kind = s.kind == "ball_walk"        ? ChainKind::ball_walk
             : s.kind == "exact_resample" ? ChainKind::exact_resample
                                          : ChainKind::hit_and_run;
    c.delta = s.delta;
    c.lazy = s.lazy;
    c.max_chord_retries = s.max_chord_retries;
    return c;
}

PartitionSpec build_partition(const PartitionConfig& p, const ConvexBody& body) {
    // {<a, x> <= b} is the same halfspace as {<a/|a|, x> <= b/|a|}.
    PartitionSpec s;
    const Vector a = to_vector(p.normal);
    const double norm = a.norm();
    s.normal = a / norm;
    s.offset = p.offset ? *p.offset / norm : s.normal.dot(body.center());
    return s;
}

}  // namespace hitrun::cli
