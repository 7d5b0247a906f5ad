#pragma once

#include <optional>
#include <string>
#include <vector>

namespace agcal {

// Three-valued answer for asymptotic queries. Numeric mode never upgrades
// itself to certainty: confidence stays below 1 and Fails needs a sustained
// violation trend, not a single bad sample.
enum class Status { Holds, Fails, Inconclusive };
enum class Mode { Exact, Numeric };

const char* statusName(Status s);
const char* modeName(Mode m);

struct Witness {
    double boundConstant = 1.0; // H in |x| <= H |y| from eps0 on
    double eps0 = 1.0;
    bool boundExact = false;
};

struct Verdict {
    Status status = Status::Inconclusive;
    Mode mode = Mode::Numeric;
    std::optional<Witness> witness;      // populated for Holds
    std::vector<double> counterexample;  // decreasing eps (or growing n), for Fails
    double confidence = 0.0;             // 1 for Exact, fitted in (0,1) otherwise
    std::string note;

    bool holds() const { return status == Status::Holds; }
    bool fails() const { return status == Status::Fails; }

    static Verdict holdsExact(Witness w, std::string note = {}) {
        return {Status::Holds, Mode::Exact, w, {}, 1.0, std::move(note)};
    }
    static Verdict failsExact(std::vector<double> cex, std::string note = {}) {
        return {Status::Fails, Mode::Exact, std::nullopt, std::move(cex), 1.0, std::move(note)};
    }
    static Verdict holdsNumeric(Witness w, double conf, std::string note = {}) {
        return {Status::Holds, Mode::Numeric, w, {}, conf, std::move(note)};
    }
    static Verdict failsNumeric(std::vector<double> cex, double conf, std::string note = {}) {
        return {Status::Fails, Mode::Numeric, std::nullopt, std::move(cex), conf, std::move(note)};
    }
    static Verdict inconclusive(std::string note = {}, double conf = 0.0) {
        return {Status::Inconclusive, Mode::Numeric, std::nullopt, {}, conf, std::move(note)};
    }

    // Conjunction helper: weakest status wins, numeric mode is contagious.
    static Verdict both(const Verdict& a, const Verdict& b);
};

struct LimitValue {
    enum class Kind { Finite, PlusInf, MinusInf, UnsignedInf, None } kind = Kind::None;
    double value = 0.0; // when Finite
    bool exact = false;
    Mode mode = Mode::Numeric;
    double confidence = 0.0;
    std::string note;
};

const char* limitKindName(LimitValue::Kind k);

} // namespace agcal
