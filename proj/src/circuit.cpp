#include "hairball/circuit.hpp"

#include <sstream>

namespace hairball {

Rat sqrt_lower(const Rat& x, unsigned prec) {
    if (x < 0) throw std::domain_error("sqrt of negative");
    // floor(sqrt(x * 4^prec)) / 2^prec <= sqrt(x), error < 2^-prec
    Int scaled_num = x.get_num() << (2 * prec);
    Int q = scaled_num / x.get_den();
    Int r;
    mpz_sqrt(r.get_mpz_t(), q.get_mpz_t());
    Rat out(r);
    out /= pow2(static_cast<long>(prec));
    mpq_canonicalize(out.get_mpq_t());
    return out;
}

Rat sqrt_upper(const Rat& x, unsigned prec) {
    Rat lo = sqrt_lower(x, prec);
    Rat hi = lo + pow2(-static_cast<long>(prec));
    return hi * hi >= x ? hi : hi + pow2(-static_cast<long>(prec));
}

int sign_quadratic(const Rat& a, const Rat& b, const Rat& s) {
    // sign of a + b*sqrt(s)
    int sa = sgn(a), sb = sgn(b);
    if (s == 0 || sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: compare a^2 vs b^2*s
    Rat lhs = a * a, rhs = b * b * s;
    if (lhs == rhs) return 0;
    return (lhs > rhs) ? sa : sb;
}

std::string rat_to_string(const Rat& x) {
    std::string s = x.get_num().get_str();
    if (x.get_den() != 1) s += "/" + x.get_den().get_str();
    return s;
}

std::optional<Rat> rat_from_string(const std::string& s) {
    if (s.empty()) return std::nullopt;
    size_t slash = s.find('/');
    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    try {
        if (slash == std::string::npos) {
            if (!is_int(s)) return std::nullopt;
            return Rat(Int(s));
        }
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) return std::nullopt;
        Int d(den);
        if (d == 0) return std::nullopt;
        Rat r(Int(num), d);
        mpq_canonicalize(r.get_mpq_t());
        return r;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

ArithCircuit::ArithCircuit(CircuitClass cls, uint32_t inputs, std::vector<Gate> gates,
                           std::vector<uint32_t> outputs)
    : cls_(cls), inputs_(inputs), gates_(std::move(gates)), outputs_(std::move(outputs)) {
    for (size_t i = 0; i < gates_.size(); ++i) {
        const Gate& g = gates_[i];
        switch (g.op) {
            case GateOp::Input:
                if (g.a >= inputs_) throw CircuitError("input index out of range");
                break;
            case GateOp::Const:
                break;
            case GateOp::MulConst:
                if (g.a >= i) throw CircuitError("forward gate reference");
                break;
            case GateOp::Mul:
            case GateOp::Div:
                if (cls_ == CircuitClass::Linear)
                    throw WrongClass("mul/div gate in a linear-class circuit");
                [[fallthrough]];
            default:
                if (g.a >= i || g.b >= i) throw CircuitError("forward gate reference");
        }
    }
    for (uint32_t o : outputs_)
        if (o >= gates_.size()) throw CircuitError("output refers to missing gate");
}

void ArithCircuit::evaluate_into(const RatVec& x, RatVec& wires, RatVec& out) const {
    if (x.size() != inputs_) throw ArityMismatch("expected " + std::to_string(inputs_) + " inputs");
    wires.resize(gates_.size());
    for (size_t i = 0; i < gates_.size(); ++i) {
        const Gate& g = gates_[i];
        Rat& w = wires[i];
        switch (g.op) {
            case GateOp::Input: w = x[g.a]; break;
            case GateOp::Const: w = g.c; break;
            case GateOp::Add: w = wires[g.a] + wires[g.b]; break;
            case GateOp::Sub: w = wires[g.a] - wires[g.b]; break;
            case GateOp::MulConst: w = g.c * wires[g.a]; break;
            case GateOp::Max: w = rat_max(wires[g.a], wires[g.b]); break;
            case GateOp::Min: w = rat_min(wires[g.a], wires[g.b]); break;
            case GateOp::Mul: w = wires[g.a] * wires[g.b]; break;
            case GateOp::Div:
                if (wires[g.b] == 0) throw DivisionByZero(static_cast<uint32_t>(i));
                w = wires[g.a] / wires[g.b];
                break;
        }
    }
    out.resize(outputs_.size());
    for (size_t i = 0; i < outputs_.size(); ++i) out[i] = wires[outputs_[i]];
}

RatVec ArithCircuit::evaluate(const RatVec& x) const {
    RatVec wires, out;
    evaluate_into(x, wires, out);
    return out;
}

Int ArithCircuit::size() const {
    Int s(gates_.size());
    for (const Gate& g : gates_) {
        if (g.op == GateOp::Const || g.op == GateOp::MulConst)
            s += Int(bit_length(g.c.get_num())) + Int(bit_length(g.c.get_den())) + 1;
    }
    return s;
}

CertifiedBounds lipschitz_certified(const ArithCircuit& c, const Rat& domain_bound) {
    if (c.cls() != CircuitClass::Linear)
        throw WrongClass("certified bounds require a linear-class circuit");
    std::vector<Rat> lip(c.gates().size()), rng(c.gates().size());
    for (size_t i = 0; i < c.gates().size(); ++i) {
        const Gate& g = c.gates()[i];
        switch (g.op) {
            case GateOp::Input: lip[i] = 1; rng[i] = domain_bound; break;
            case GateOp::Const: lip[i] = 0; rng[i] = rat_abs(g.c); break;
            case GateOp::Add:
            case GateOp::Sub:
                lip[i] = lip[g.a] + lip[g.b];
                rng[i] = rng[g.a] + rng[g.b];
                break;
            case GateOp::MulConst:
                lip[i] = rat_abs(g.c) * lip[g.a];
                rng[i] = rat_abs(g.c) * rng[g.a];
                break;
            case GateOp::Max:
            case GateOp::Min:
                lip[i] = rat_max(lip[g.a], lip[g.b]);
                rng[i] = rat_max(rng[g.a], rng[g.b]);
                break;
            default: throw WrongClass("unexpected gate");
        }
    }
    CertifiedBounds out{Rat(0), Rat(0)};
    for (uint32_t o : c.outputs()) {
        out.lip = rat_max(out.lip, lip[o]);
        out.range = rat_max(out.range, rng[o]);
    }
    return out;
}

CoarseLipschitz lipschitz_coarse(const ArithCircuit& c, unsigned k) {
    if (c.cls() != CircuitClass::Linear)
        throw WrongClass("coarse bound is stated for linear-class circuits");
    Int sz = c.size();
    unsigned long e = mpz_get_ui(Int(sz * sz).get_mpz_t());
    Rat raw = pow2(static_cast<long>(e));
    CoarseLipschitz out;
    out.raw = raw;
    out.sup_on_ball = raw;
    out.projected = Rat(k) * raw * 8;
    return out;
}

// --- text format -----------------------------------------------------------

static const char* op_name(GateOp op) {
    switch (op) {
        case GateOp::Input: return "input";
        case GateOp::Const: return "const";
        case GateOp::Add: return "add";
        case GateOp::Sub: return "sub";
        case GateOp::MulConst: return "mulc";
        case GateOp::Max: return "max";
        case GateOp::Min: return "min";
        case GateOp::Mul: return "mul";
        case GateOp::Div: return "div";
    }
    return "?";
}

std::string serialize_circuit(const ArithCircuit& c) {
    std::ostringstream os;
    os << "circuit " << (c.cls() == CircuitClass::Linear ? "linear" : "full")
       << " inputs=" << c.inputs() << " outputs=";
    for (size_t i = 0; i < c.outputs().size(); ++i)
        os << (i ? "," : "") << 'g' << c.outputs()[i];
    os << '\n';
    for (size_t i = 0; i < c.gates().size(); ++i) {
        const Gate& g = c.gates()[i];
        os << 'g' << i << " = " << op_name(g.op);
        switch (g.op) {
            case GateOp::Input: os << ' ' << g.a; break;
            case GateOp::Const: os << ' ' << rat_to_string(g.c); break;
            case GateOp::MulConst: os << ' ' << rat_to_string(g.c) << " g" << g.a; break;
            default: os << " g" << g.a << " g" << g.b; break;
        }
        os << '\n';
    }
    return os.str();
}

namespace {

struct LineParser {
    std::istringstream in;
    size_t line;
    explicit LineParser(const std::string& s, size_t ln) : in(s), line(ln) {}
    std::string token() {
        std::string t;
        in >> t;
        return t;
    }
    uint32_t gate_ref(size_t current) {
        std::string t = token();
        if (t.size() < 2 || t[0] != 'g') throw ParseError(line, "expected gate reference, got '" + t + "'");
        char* end = nullptr;
        unsigned long v = strtoul(t.c_str() + 1, &end, 10);
        if (*end != '\0') throw ParseError(line, "bad gate reference '" + t + "'");
        if (v >= current) throw ParseError(line, "forward gate reference '" + t + "'");
        return static_cast<uint32_t>(v);
    }
    Rat rational() {
        std::string t = token();
        auto r = rat_from_string(t);
        if (!r) throw ParseError(line, "bad rational '" + t + "'");
        return *r;
    }
};

} // namespace

ArithCircuit parse_circuit(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;

    if (!std::getline(in, line)) throw ParseError(1, "empty circuit");
    ++lineno;
    std::istringstream hdr(line);
    std::string word, clsword, inputs_kv, outputs_kv;
    hdr >> word >> clsword >> inputs_kv >> outputs_kv;
    if (word != "circuit") throw ParseError(lineno, "missing 'circuit' header");
    CircuitClass cls;
    if (clsword == "linear") cls = CircuitClass::Linear;
    else if (clsword == "full") cls = CircuitClass::Full;
    else throw ParseError(lineno, "class must be 'linear' or 'full'");
    if (inputs_kv.rfind("inputs=", 0) != 0) throw ParseError(lineno, "missing inputs=");
    if (outputs_kv.rfind("outputs=", 0) != 0) throw ParseError(lineno, "missing outputs=");
    uint32_t inputs = static_cast<uint32_t>(strtoul(inputs_kv.c_str() + 7, nullptr, 10));

    std::vector<Gate> gates;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        LineParser p(line, lineno);
        std::string gname = p.token();
        if (gname != "g" + std::to_string(gates.size()))
            throw ParseError(lineno, "expected g" + std::to_string(gates.size()));
        if (p.token() != "=") throw ParseError(lineno, "expected '='");
        std::string op = p.token();
        Gate g;
        if (op == "input") {
            g.op = GateOp::Input;
            g.a = static_cast<uint32_t>(strtoul(p.token().c_str(), nullptr, 10));
            if (g.a >= inputs) throw ParseError(lineno, "input index out of range");
        } else if (op == "const") {
            g.op = GateOp::Const;
            g.c = p.rational();
        } else if (op == "mulc") {
            g.op = GateOp::MulConst;
            g.c = p.rational();
            g.a = p.gate_ref(gates.size());
        } else {
            if (op == "add") g.op = GateOp::Add;
            else if (op == "sub") g.op = GateOp::Sub;
            else if (op == "max") g.op = GateOp::Max;
            else if (op == "min") g.op = GateOp::Min;
            else if (op == "mul") g.op = GateOp::Mul;
            else if (op == "div") g.op = GateOp::Div;
            else throw ParseError(lineno, "unknown op '" + op + "'");
            if ((g.op == GateOp::Mul || g.op == GateOp::Div) && cls == CircuitClass::Linear)
                throw ParseError(lineno, "mul/div not allowed in linear class");
            g.a = p.gate_ref(gates.size());
            g.b = p.gate_ref(gates.size());
        }
        gates.push_back(std::move(g));
    }

    std::vector<uint32_t> outputs;
    std::string olist = outputs_kv.substr(8);
    size_t pos = 0;
    while (pos < olist.size()) {
        size_t comma = olist.find(',', pos);
        std::string item = olist.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (item.size() < 2 || item[0] != 'g') throw ParseError(1, "bad output '" + item + "'");
        unsigned long v = strtoul(item.c_str() + 1, nullptr, 10);
        if (v >= gates.size()) throw ParseError(1, "output g" + std::to_string(v) + " missing");
        outputs.push_back(static_cast<uint32_t>(v));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return ArithCircuit(cls, inputs, std::move(gates), std::move(outputs));
}

// --- builder ---------------------------------------------------------------

CircuitBuilder::CircuitBuilder(CircuitClass cls, uint32_t inputs) : cls_(cls), inputs_(inputs) {}

uint32_t CircuitBuilder::push(Gate g) {
    gates_.push_back(std::move(g));
    return static_cast<uint32_t>(gates_.size() - 1);
}

uint32_t CircuitBuilder::input(uint32_t i) {
    if (i >= inputs_) throw CircuitError("input index out of range");
    return push({GateOp::Input, i, 0, Rat(0)});
}
uint32_t CircuitBuilder::constant(const Rat& c) { return push({GateOp::Const, 0, 0, c}); }
uint32_t CircuitBuilder::add(uint32_t a, uint32_t b) { return push({GateOp::Add, a, b, Rat(0)}); }
uint32_t CircuitBuilder::sub(uint32_t a, uint32_t b) { return push({GateOp::Sub, a, b, Rat(0)}); }
uint32_t CircuitBuilder::mulc(const Rat& c, uint32_t a) { return push({GateOp::MulConst, a, 0, c}); }
uint32_t CircuitBuilder::max(uint32_t a, uint32_t b) { return push({GateOp::Max, a, b, Rat(0)}); }
uint32_t CircuitBuilder::min(uint32_t a, uint32_t b) { return push({GateOp::Min, a, b, Rat(0)}); }
uint32_t CircuitBuilder::mul(uint32_t a, uint32_t b) {
    if (cls_ == CircuitClass::Linear) throw WrongClass("mul gate in linear class");
    return push({GateOp::Mul, a, b, Rat(0)});
}
uint32_t CircuitBuilder::div(uint32_t a, uint32_t b) {
    if (cls_ == CircuitClass::Linear) throw WrongClass("div gate in linear class");
    return push({GateOp::Div, a, b, Rat(0)});
}

uint32_t CircuitBuilder::add_many(const std::vector<uint32_t>& ids) {
    if (ids.empty()) return constant(Rat(0));
    uint32_t acc = ids[0];
    for (size_t i = 1; i < ids.size(); ++i) acc = add(acc, ids[i]);
    return acc;
}

uint32_t CircuitBuilder::max_many(const std::vector<uint32_t>& ids) {
    if (ids.empty()) throw CircuitError("max of nothing");
    uint32_t acc = ids[0];
    for (size_t i = 1; i < ids.size(); ++i) acc = max(acc, ids[i]);
    return acc;
}

std::vector<uint32_t> CircuitBuilder::splice(const ArithCircuit& c, const std::vector<uint32_t>& args) {
    if (args.size() != c.inputs()) throw ArityMismatch("splice arity");
    std::vector<uint32_t> remap(c.gates().size());
    for (size_t i = 0; i < c.gates().size(); ++i) {
        Gate g = c.gates()[i];
        if (g.op == GateOp::Input) {
            remap[i] = args[g.a];
            continue;
        }
        switch (g.op) {
            case GateOp::Const: break;
            case GateOp::MulConst: g.a = remap[g.a]; break;
            default: g.a = remap[g.a]; g.b = remap[g.b]; break;
        }
        if ((g.op == GateOp::Mul || g.op == GateOp::Div) && cls_ == CircuitClass::Linear)
            throw WrongClass("splicing full-class circuit into linear builder");
        remap[i] = push(std::move(g));
    }
    std::vector<uint32_t> outs;
    outs.reserve(c.outputs().size());
    for (uint32_t o : c.outputs()) outs.push_back(remap[o]);
    return outs;
}

ArithCircuit CircuitBuilder::build(std::vector<uint32_t> outputs) && {
    return ArithCircuit(cls_, inputs_, std::move(gates_), std::move(outputs));
}

ArithCircuit identity_circuit(uint32_t n) {
    CircuitBuilder b(CircuitClass::Linear, n);
    std::vector<uint32_t> outs;
    for (uint32_t i = 0; i < n; ++i) outs.push_back(b.input(i));
    return std::move(b).build(std::move(outs));
}

ArithCircuit constant_circuit(const RatVec& values, uint32_t inputs) {
    CircuitBuilder b(CircuitClass::Linear, inputs);
    std::vector<uint32_t> outs;
    for (const Rat& v : values) outs.push_back(b.constant(v));
    return std::move(b).build(std::move(outs));
}

} // namespace hairball
