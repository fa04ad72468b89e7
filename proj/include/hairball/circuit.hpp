#pragma once

#include "hairball/rational.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hairball {

enum class GateOp : uint8_t { Input, Const, Add, Sub, MulConst, Max, Min, Mul, Div };

enum class CircuitClass : uint8_t { Linear, Full };

struct Gate {
    GateOp op = GateOp::Const;
    uint32_t a = 0; // gate ref, or input index for Input
    uint32_t b = 0; // gate ref for binary ops
    Rat c;          // constant for Const / MulConst
};

struct CircuitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ArityMismatch : CircuitError {
    using CircuitError::CircuitError;
};
struct DivisionByZero : CircuitError {
    uint32_t gate;
    explicit DivisionByZero(uint32_t g)
        : CircuitError("division by zero at gate g" + std::to_string(g)), gate(g) {}
};
struct WrongClass : CircuitError {
    using CircuitError::CircuitError;
};
struct ParseError : CircuitError {
    size_t line;
    ParseError(size_t ln, const std::string& what)
        : CircuitError("line " + std::to_string(ln) + ": " + what), line(ln) {}
};

// Immutable DAG of arithmetic gates over exact rationals. Gate references
// always point backwards, so `gates` is already a topological order.
class ArithCircuit {
  public:
    ArithCircuit(CircuitClass cls, uint32_t inputs, std::vector<Gate> gates,
                 std::vector<uint32_t> outputs);

    CircuitClass cls() const { return cls_; }
    uint32_t inputs() const { return inputs_; }
    uint32_t num_outputs() const { return static_cast<uint32_t>(outputs_.size()); }
    const std::vector<Gate>& gates() const { return gates_; }
    const std::vector<uint32_t>& outputs() const { return outputs_; }

    RatVec evaluate(const RatVec& x) const;
    // Evaluation with caller-owned scratch; avoids reallocating wire storage
    // in tight loops (path following, grid scans).
    void evaluate_into(const RatVec& x, RatVec& wires, RatVec& out) const;

    // Gate count plus total bit length of all constants
    // (bits(|num|) + bits(den) + 1 per constant).
    Int size() const;

  private:
    CircuitClass cls_;
    uint32_t inputs_;
    std::vector<Gate> gates_;
    std::vector<uint32_t> outputs_;
};

struct CertifiedBounds {
    Rat lip;   // dominates the linf->linf Lipschitz constant
    Rat range; // dominates sup ||output||inf over ||x||inf <= domain_bound
};

// Per-gate propagation of Lipschitz and range bounds (linear class only).
CertifiedBounds lipschitz_certified(const ArithCircuit& c, const Rat& domain_bound);

struct CoarseLipschitz {
    Rat projected;    // k * 2^(size^2 + 3), for x -> P_x[F(x)]
    Rat raw;          // 2^(size^2), raw circuit bound
    Rat sup_on_ball;  // 2^(size^2), sup ||F||inf on the unit ball
};

// Worst-case bound from circuit size alone (linear class only). Blows up
// quickly; only usable on small circuits.
CoarseLipschitz lipschitz_coarse(const ArithCircuit& c, unsigned k);

std::string serialize_circuit(const ArithCircuit& c);
ArithCircuit parse_circuit(const std::string& text);

// Incremental construction; produces an immutable circuit at the end.
class CircuitBuilder {
  public:
    explicit CircuitBuilder(CircuitClass cls, uint32_t inputs);

    uint32_t input(uint32_t i);
    uint32_t constant(const Rat& c);
    uint32_t add(uint32_t a, uint32_t b);
    uint32_t sub(uint32_t a, uint32_t b);
    uint32_t mulc(const Rat& c, uint32_t a);
    uint32_t max(uint32_t a, uint32_t b);
    uint32_t min(uint32_t a, uint32_t b);
    uint32_t mul(uint32_t a, uint32_t b); // full class only
    uint32_t div(uint32_t a, uint32_t b); // full class only

    uint32_t neg(uint32_t a) { return mulc(Rat(-1), a); }
    uint32_t abs(uint32_t a) { return max(a, neg(a)); }
    // min(hi, max(lo, a))
    uint32_t clamp(uint32_t a, uint32_t lo, uint32_t hi) { return min(hi, max(lo, a)); }
    uint32_t add_many(const std::vector<uint32_t>& ids);
    uint32_t max_many(const std::vector<uint32_t>& ids);

    // Splices all gates of `c`, rewiring its input gates to `args`;
    // returns the spliced circuit's output ids.
    std::vector<uint32_t> splice(const ArithCircuit& c, const std::vector<uint32_t>& args);

    ArithCircuit build(std::vector<uint32_t> outputs) &&;

  private:
    CircuitClass cls_;
    uint32_t inputs_;
    std::vector<Gate> gates_;
    uint32_t push(Gate g);
};

// Convenience constructors used all over the test fixtures.
ArithCircuit identity_circuit(uint32_t n);
ArithCircuit constant_circuit(const RatVec& values, uint32_t inputs);

} // namespace hairball
