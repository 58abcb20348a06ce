/*
   Copyright 2026 The critchain Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "critchain/spec_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace critchain {

using json = nlohmann::json;

namespace {

// --- line index ---------------------------------------------------------

std::string escape_pointer_token(const std::string& key)
{
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

// Input iterator that publishes how far the parser has read.
class TrackingIterator {
public:
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    TrackingIterator(const char* p, const char* base, std::size_t* offset)
        : p_(p), base_(base), offset_(offset)
    {
    }
    reference operator*() const { return *p_; }
    TrackingIterator& operator++()
    {
        ++p_;
        *offset_ = static_cast<std::size_t>(p_ - base_);
        return *this;
    }
    TrackingIterator operator++(int)
    {
        auto tmp = *this;
        ++*this;
        return tmp;
    }
    bool operator==(const TrackingIterator& o) const { return p_ == o.p_; }
    bool operator!=(const TrackingIterator& o) const { return p_ != o.p_; }

private:
    const char* p_;
    const char* base_;
    std::size_t* offset_;
};

// Maps JSON pointers to the source line where the key or element appears.
class LineIndex : public nlohmann::json_sax<json> {
public:
    LineIndex(std::string_view text, std::size_t* offset) : offset_(offset)
    {
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n')
                newlines_.push_back(i);
    }

    int line_of_offset(std::size_t off) const
    {
        return 1 + static_cast<int>(std::lower_bound(newlines_.begin(), newlines_.end(), off) -
                                    newlines_.begin());
    }

    int line(const std::string& pointer) const
    {
        auto it = lines_.find(pointer);
        return it == lines_.end() ? 0 : it->second;
    }

    bool null() override { return value(); }
    bool boolean(bool) override { return value(); }
    bool number_integer(number_integer_t) override { return value(); }
    bool number_unsigned(number_unsigned_t) override { return value(); }
    bool number_float(number_float_t, const string_t&) override { return value(); }
    bool string(string_t&) override { return value(); }
    bool binary(binary_t&) override { return value(); }
    bool start_object(std::size_t) override { return open(false); }
    bool start_array(std::size_t) override { return open(true); }
    bool end_object() override { return close(); }
    bool end_array() override { return close(); }
    bool key(string_t& k) override
    {
        auto& f = stack_.back();
        f.key = escape_pointer_token(k);
        lines_[f.path + "/" + f.key] = current_line();
        return true;
    }
    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override
    {
        return false;
    }

private:
    struct Frame {
        bool array;
        std::string path;
        std::string key;
        std::size_t index = 0;
    };

    int current_line() const { return line_of_offset(*offset_ > 0 ? *offset_ - 1 : 0); }

    std::string child_path()
    {
        if (stack_.empty())
            return "";
        auto& f = stack_.back();
        if (f.array) {
            std::string p = f.path + "/" + std::to_string(f.index);
            lines_[p] = current_line();
            return p;
        }
        return f.path + "/" + f.key;
    }

    bool value()
    {
        child_path();
        advance();
        return true;
    }
    bool open(bool array)
    {
        std::string p = child_path();
        if (stack_.empty())
            lines_[p] = current_line();
        stack_.push_back({array, p, "", 0});
        return true;
    }
    bool close()
    {
        stack_.pop_back();
        advance();
        return true;
    }
    void advance()
    {
        if (!stack_.empty() && stack_.back().array)
            ++stack_.back().index;
    }

    std::size_t* offset_;
    std::vector<std::size_t> newlines_;
    std::vector<Frame> stack_;
    std::map<std::string, int> lines_;
};

// --- schema reader -------------------------------------------------------

class Node {
public:
    Node(const json& j, std::string path, const LineIndex& index)
        : j_(j), path_(std::move(path)), index_(index)
    {
    }

    [[noreturn]] void error(const std::string& msg) const
    {
        std::ostringstream os;
        os << "schema error at " << (path_.empty() ? "/" : path_);
        if (int line = index_.line(path_))
            os << " (line " << line << ")";
        os << ": " << msg;
        fail(ErrorCode::schema, os.str());
    }

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }

    void require_object() const
    {
        if (!j_.is_object())
            error("expected an object");
    }

    void allow_only(std::initializer_list<const char*> keys) const
    {
        require_object();
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items())
            if (!allowed.count(k))
                child(k).error("unknown field '" + k + "'");
    }

    bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

    Node child(const std::string& key) const
    {
        static const json missing;
        auto p = path_ + "/" + escape_pointer_token(key);
        if (j_.is_object() && j_.contains(key))
            return Node(j_.at(key), p, index_);
        return Node(missing, p, index_);
    }

    Node element(std::size_t i) const
    {
        return Node(j_.at(i), path_ + "/" + std::to_string(i), index_);
    }

    Node required(const std::string& key) const
    {
        if (!has(key))
            child(key).error("missing required field");
        return child(key);
    }

    double number() const
    {
        if (!j_.is_number())
            error("expected a number");
        double v = j_.get<double>();
        if (!std::isfinite(v))
            error("expected a finite number");
        return v;
    }

    double number_or(const std::string& key, double fallback) const
    {
        return has(key) ? child(key).number() : fallback;
    }

    double positive(const std::string& key) const
    {
        double v = required(key).number();
        if (!(v > 0.0))
            child(key).error("must be positive");
        return v;
    }

    std::uint64_t count() const
    {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0))
            error("expected a non-negative integer");
        return j_.get<std::uint64_t>();
    }

    std::string string() const
    {
        if (!j_.is_string())
            error("expected a string");
        return j_.get<std::string>();
    }

    std::size_t array_size() const
    {
        if (!j_.is_array())
            error("expected an array");
        return j_.size();
    }

private:
    const json& j_;
    std::string path_;
    const LineIndex& index_;
};

// Wrap engine errors raised while building a value with the node location.
template <class F>
auto at(const Node& node, F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::schema && std::string(e.what()).rfind("schema error", 0) == 0)
            throw;
        node.error(e.what());
    }
}

// A positive quantity given directly or as a list of attributes to multiply.
double quantity(const Node& n)
{
    if (n.raw().is_object()) {
        n.allow_only({"attributes"});
        Node list = n.required("attributes");
        std::vector<double> attrs(list.array_size());
        for (std::size_t i = 0; i < attrs.size(); ++i)
            attrs[i] = list.element(i).number();
        Enthalpy H = at(n, [&] { return enthalpy_from_attributes(attrs); });
        if (!std::isfinite(H.value()))
            n.error("attribute product overflows");
        return H.value();
    }
    double v = n.number();
    if (!(v > 0.0))
        n.error("must be positive");
    return v;
}

SigmaProfile read_sigma(const Node& n)
{
    n.require_object();
    std::string form = n.required("form").string();
    auto domain = [&](double& lo, double& hi) {
        lo = 0.0;
        hi = SigmaProfile::unbounded;
        if (!n.has("domain"))
            return;
        Node d = n.child("domain");
        if (d.array_size() != 2)
            d.error("domain must be [lo, hi]");
        lo = d.element(0).number();
        if (!d.raw().at(1).is_null())
            hi = d.element(1).number();
    };
    double lo, hi;
    if (form == "constant") {
        n.allow_only({"form", "c", "domain"});
        domain(lo, hi);
        double c = n.required("c").number();
        return at(n, [&] { return SigmaProfile::constant(c, lo, hi); });
    }
    if (form == "power") {
        n.allow_only({"form", "c", "beta", "domain"});
        domain(lo, hi);
        double c = n.required("c").number();
        double beta = n.required("beta").number();
        return at(n, [&] { return SigmaProfile::power_law(c, beta, lo, hi); });
    }
    if (form == "piecewise") {
        n.allow_only({"form", "H_lo", "H_hi", "values"});
        Node vals = n.required("values");
        std::vector<double> values(vals.array_size());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = vals.element(i).number();
        double H_lo = n.required("H_lo").number();
        double H_hi = n.required("H_hi").number();
        return at(n, [&] { return SigmaProfile::piecewise(H_lo, H_hi, values); });
    }
    n.child("form").error("unknown sigma form '" + form + "' (constant, power, piecewise)");
}

InteractionKind read_kind(const Node& n, const std::string& key)
{
    if (key == "entry") return InteractionKind::entry;
    if (key == "forwarding") return InteractionKind::forwarding;
    if (key == "delivery") return InteractionKind::delivery;
    if (key == "loss") return InteractionKind::loss;
    n.child(key).error("unknown interaction kind '" + key + "'");
}

Role read_role(const Node& n)
{
    std::string r = n.string();
    if (r == "receptor") return Role::receptor;
    if (r == "mediator") return Role::mediator;
    if (r == "courier") return Role::courier;
    if (r == "absorber") return Role::absorber;
    n.error("unknown role '" + r + "'");
}

Interactor read_interactor(const Node& n)
{
    n.allow_only({"name", "role", "factors", "capacity", "cost"});
    Interactor it;
    it.name = n.required("name").string();
    it.role = read_role(n.required("role"));
    Node factors = n.required("factors");
    factors.require_object();
    for (const auto& [key, value] : factors.raw().items()) {
        InteractionKind kind = read_kind(factors, key);
        Node f = factors.child(key);
        f.allow_only({"sigma", "count"});
        MacroFactor mf{read_sigma(f.required("sigma")), f.number_or("count", 1.0)};
        if (!(mf.count >= 0.0))
            f.child("count").error("must be non-negative");
        it.factors.emplace(kind, mf);
    }
    if (n.has("capacity"))
        it.capacity = Inertia(quantity(n.child("capacity")));
    it.cost = n.number_or("cost", 0.0);
    if (!(it.cost >= 0.0))
        n.child("cost").error("must be non-negative");
    if (it.role == Role::mediator && !it.capacity)
        n.error("mediator needs a capacity");
    return it;
}

std::vector<Interactor> read_stage(const Node& n)
{
    n.allow_only({"interactors"});
    Node list = n.required("interactors");
    std::vector<Interactor> out;
    for (std::size_t i = 0; i < list.array_size(); ++i)
        out.push_back(read_interactor(list.element(i)));
    return out;
}

DiffusionSpec read_diffusion(const Node& n)
{
    n.allow_only({"segments", "phi0", "feasibility_multiple", "x_max", "grid_n"});
    DiffusionSpec d;
    Node segs = n.required("segments");
    d.segments.clear();
    for (std::size_t i = 0; i < segs.array_size(); ++i) {
        Node s = segs.element(i);
        s.allow_only({"x_begin", "D", "sigma_d", "sigma_l"});
        d.segments.push_back({s.number_or("x_begin", 0.0), s.required("D").number(),
                              s.number_or("sigma_d", 0.0), s.number_or("sigma_l", 0.0)});
    }
    d.phi0 = n.positive("phi0");
    d.feasibility_multiple = n.number_or("feasibility_multiple", 6.0);
    d.x_max = n.positive("x_max");
    d.grid_n = n.has("grid_n") ? n.child("grid_n").count() : 1024;
    at(n, [&] { validate(d); return 0; });
    return d;
}

Catalog read_catalog(const Node& n)
{
    n.allow_only({"budget", "max_copies", "candidates"});
    Catalog c;
    c.budget = n.required("budget").number();
    c.max_copies = n.has("max_copies") ? n.child("max_copies").count() : 1;
    Node list = n.required("candidates");
    for (std::size_t i = 0; i < list.array_size(); ++i)
        c.candidates.push_back(read_interactor(list.element(i)));
    at(n, [&] { validate(c); return 0; });
    return c;
}

ChainDocument read_document(const Node& root)
{
    root.allow_only({"spec_version", "name", "H_max", "H_c", "item_inertia", "market_temperature",
                     "total_flow", "lastmile_escape_mode", "isotropy_factor", "entry", "forwarding",
                     "lastmile", "diffusion", "catalog"});
    Node version = root.required("spec_version");
    if (!version.raw().is_number_integer() || version.raw().get<std::int64_t>() != spec_version)
        version.error("unsupported spec_version (expected 1)");

    ChainDocument doc;
    ChainSpec& c = doc.chain;
    c.name = root.has("name") ? root.child("name").string() : "";
    double H_max = quantity(root.required("H_max"));
    double H_c = quantity(root.required("H_c"));
    if (!(H_c <= H_max))
        root.child("H_c").error("H_c must not exceed H_max");
    c.item_inertia = Inertia(quantity(root.required("item_inertia")));
    c.lastmile_temperature = MarketTemperature(root.positive("market_temperature"));
    c.total_flow = root.positive("total_flow");
    if (root.has("lastmile_escape_mode")) {
        Node m = root.child("lastmile_escape_mode");
        std::string mode = m.string();
        if (mode == "rate-ratio")
            c.lastmile_mode = LastMileMode::rate_ratio;
        else if (mode == "pointwise-mean")
            c.lastmile_mode = LastMileMode::pointwise_mean;
        else
            m.error("expected 'rate-ratio' or 'pointwise-mean'");
    }
    c.isotropy_factor = root.number_or("isotropy_factor", default_isotropy_factor);
    c.entry.interactors = read_stage(root.required("entry"));
    c.forwarding.interactors = read_stage(root.required("forwarding"));
    c.lastmile.interactors = read_stage(root.required("lastmile"));
    c.set_window(H_max, H_c);
    c.diffusion = read_diffusion(root.required("diffusion"));
    if (root.has("catalog"))
        doc.catalog = read_catalog(root.child("catalog"));
    at(root, [&] { validate(c); return 0; });
    return doc;
}

// --- writers ------------------------------------------------------------

json number_json(double x)
{
    if (std::isfinite(x))
        return x;
    return nullptr;
}

json sigma_json(const SigmaProfile& s)
{
    json j;
    auto domain = [&] {
        if (s.domain_lo() != 0.0 || std::isfinite(s.domain_hi()))
            j["domain"] = json::array({s.domain_lo(), number_json(s.domain_hi())});
    };
    switch (s.form()) {
    case SigmaProfile::Form::constant:
        j["form"] = "constant";
        j["c"] = s.c();
        domain();
        break;
    case SigmaProfile::Form::power_law:
        j["form"] = "power";
        j["c"] = s.c();
        j["beta"] = s.beta();
        domain();
        break;
    case SigmaProfile::Form::piecewise:
        j["form"] = "piecewise";
        j["H_lo"] = s.grid_lo();
        j["H_hi"] = s.domain_hi();
        j["values"] = s.values();
        break;
    }
    return j;
}

json interactor_json(const Interactor& i)
{
    json j;
    j["name"] = i.name;
    j["role"] = to_string(i.role);
    json factors = json::object();
    for (const auto& [kind, mf] : i.factors)
        factors[to_string(kind)] = {{"sigma", sigma_json(mf.sigma)}, {"count", mf.count}};
    j["factors"] = factors;
    if (i.capacity)
        j["capacity"] = i.capacity->value();
    j["cost"] = i.cost;
    return j;
}

json stage_json(const StageSpec& s)
{
    json list = json::array();
    for (const auto& i : s.interactors)
        list.push_back(interactor_json(i));
    return {{"interactors", list}};
}

std::string csv_row(std::initializer_list<double> values)
{
    std::string out;
    bool first = true;
    for (double v : values) {
        if (!first)
            out += ',';
        out += format_number(v);
        first = false;
    }
    out += '\n';
    return out;
}

} // namespace

ChainDocument parse_chain_document(std::string_view text)
{
    std::size_t offset = 0;
    LineIndex index(text, &offset);
    TrackingIterator first(text.data(), text.data(), &offset);
    TrackingIterator last(text.data() + text.size(), text.data(), &offset);
    bool ok = json::sax_parse(first, last, &index);
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::ostringstream os;
        os << "schema error: malformed JSON (line " << index.line_of_offset(e.byte > 0 ? e.byte - 1 : 0)
           << "): " << e.what();
        fail(ErrorCode::schema, os.str());
    }
    if (!ok)
        fail(ErrorCode::schema, "schema error: malformed JSON");
    return read_document(Node(root, "", index));
}

std::optional<ChainDocument> builtin_document(std::string_view name)
{
    if (name != "reference-chain")
        return std::nullopt;
    ChainDocument doc;
    doc.chain = reference_chain();

    auto mediator = [](std::string name, double capacity, double sigma_f, double loss, double cost) {
        Interactor i;
        i.name = std::move(name);
        i.role = Role::mediator;
        i.capacity = Inertia(capacity);
        i.cost = cost;
        i.factors.emplace(InteractionKind::forwarding, MacroFactor{SigmaProfile::constant(sigma_f), 1.0});
        if (loss > 0.0)
            i.factors.emplace(InteractionKind::loss, MacroFactor{SigmaProfile::constant(loss), 1.0});
        return i;
    };
    Catalog cat;
    cat.candidates = {doc.chain.forwarding.interactors.front(),
                      mediator("hub", 8.0, 1.2, 0.05, 1.5),
                      mediator("relay", 12.0, 0.6, 0.0, 0.5),
                      mediator("express", 4.5, 0.5, 0.02, 2.0)};
    cat.budget = 3.0;
    cat.max_copies = 2;
    doc.catalog = cat;
    return doc;
}

std::string to_json_text(const ChainDocument& doc)
{
    const ChainSpec& c = doc.chain;
    json j;
    j["spec_version"] = spec_version;
    j["name"] = c.name;
    j["H_max"] = c.H_max();
    j["H_c"] = c.H_c();
    j["item_inertia"] = c.item_inertia.value();
    j["market_temperature"] = c.lastmile_temperature.value();
    j["total_flow"] = c.total_flow;
    j["lastmile_escape_mode"] = to_string(c.lastmile_mode);
    j["isotropy_factor"] = c.isotropy_factor;
    j["entry"] = stage_json(c.entry);
    j["forwarding"] = stage_json(c.forwarding);
    j["lastmile"] = stage_json(c.lastmile);
    json segs = json::array();
    for (const auto& s : c.diffusion.segments)
        segs.push_back({{"x_begin", s.x_begin}, {"D", s.D}, {"sigma_d", s.sigma_d}, {"sigma_l", s.sigma_l}});
    j["diffusion"] = {{"segments", segs},
                      {"phi0", c.diffusion.phi0},
                      {"feasibility_multiple", c.diffusion.feasibility_multiple},
                      {"x_max", c.diffusion.x_max},
                      {"grid_n", c.diffusion.grid_n}};
    if (doc.catalog) {
        json cands = json::array();
        for (const auto& i : doc.catalog->candidates)
            cands.push_back(interactor_json(i));
        j["catalog"] = {{"budget", doc.catalog->budget},
                        {"max_copies", doc.catalog->max_copies},
                        {"candidates", cands}};
    }
    return j.dump(2) + "\n";
}

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string report_json(const ChainSpec& chain, const ChainReport& r)
{
    json j;
    j["chain"] = chain.name;
    j["lastmile_escape_mode"] = to_string(chain.lastmile_mode);
    j["P_e"] = r.P_e;
    j["p"] = r.p;
    j["P_c"] = r.P_c;
    j["k"] = r.k;
    j["k_eff"] = r.k_eff;
    j["is_critical"] = r.is_critical;
    j["xi_mix"] = r.xi_mix;
    j["MA"] = number_json(r.MA);
    j["MA_infinite"] = std::isinf(r.MA);
    j["theta"] = r.theta;
    j["lastmile_temperature"] = r.lastmile_temperature;
    j["L"] = number_json(r.L);
    j["feasibility_radius"] = number_json(r.feasibility_radius);
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::string profile_csv(const EscapeProfile& profile)
{
    std::string out = "H,lethargy,p,step_loss_share\n";
    for (const auto& p : profile.points)
        out += csv_row({p.H, p.lethargy, p.p, p.step_loss_share});
    return out;
}

std::string flux_csv(const FluxProfile& flux)
{
    std::string out = "x,phi,phi_over_phi0\n";
    for (std::size_t i = 0; i < flux.x.size(); ++i)
        out += csv_row({flux.x[i], flux.phi[i], flux.phi[i] / flux.phi0});
    return out;
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows)
{
    std::string out = "H,pdf,w\n";
    for (const auto& r : rows)
        out += csv_row({r.H, r.pdf, r.w});
    return out;
}

std::string mc_json(const MCResult& r, const ChainSpec& chain)
{
    auto est = [](const Estimate& e) { return json{{"value", e.value}, {"std_error", e.std_error}}; };
    json j;
    j["chain"] = chain.name;
    j["seed"] = r.seed;
    j["n_items"] = r.n_items;
    j["estimates"] = {{"P_e", est(r.P_e)}, {"p", est(r.p)}, {"P_c", est(r.P_c)}, {"k", est(r.k)}};
    j["mean_lethargy_gain"] = est(r.mean_lethargy_gain);
    j["tallies"] = {{"entered", r.tallies.entered},
                    {"accepted", r.tallies.accepted},
                    {"reached_lastmile", r.tallies.reached_lastmile},
                    {"delivered", r.tallies.delivered},
                    {"forwarding_steps", r.tallies.forwarding_steps}};
    return j.dump(2) + "\n";
}

std::string q_histogram_csv(const SlowingDownHistogram& h)
{
    std::string out = "u_lo,u_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        out += format_number(h.edges[b]) + "," + format_number(h.edges[b + 1]) + "," +
               std::to_string(h.counts[b]) + "\n";
    return out;
}

std::string optimum_json(const Catalog& catalog, Objective objective, const std::string& method,
                         const Selection& best, const AnnealResult* anneal)
{
    json sel = json::array();
    for (std::size_t i = 0; i < best.counts.size(); ++i)
        if (best.counts[i] > 0)
            sel.push_back({{"index", i}, {"name", catalog.candidates[i].name}, {"copies", best.counts[i]}});
    json j;
    j["method"] = method;
    j["objective"] = to_string(objective);
    j["selection"] = sel;
    j["cost"] = best.total_cost;
    j["budget"] = catalog.budget;
    j["value"] = number_json(best.objective);
    j["xi_mix"] = best.xi_mix;
    if (anneal) {
        json traj = json::array();
        for (const auto& t : anneal->trajectory)
            traj.push_back({{"iteration", t.iteration}, {"objective", number_json(t.objective)}});
        j["trajectory"] = {{"seed", anneal->seed},
                           {"start_objective", number_json(anneal->start.objective)},
                           {"start_temperature", anneal->start_temperature},
                           {"evaluations", anneal->evaluations},
                           {"improvements", traj}};
    }
    return j.dump(2) + "\n";
}

} // namespace critchain
