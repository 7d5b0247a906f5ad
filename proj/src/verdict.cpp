#include "agcal/verdict.hpp"

#include <algorithm>

namespace agcal {

const char* statusName(Status s) {
    switch (s) {
        case Status::Holds: return "holds";
        case Status::Fails: return "fails";
        case Status::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* modeName(Mode m) { return m == Mode::Exact ? "exact" : "numeric"; }

const char* limitKindName(LimitValue::Kind k) {
    switch (k) {
        case LimitValue::Kind::Finite: return "finite";
        case LimitValue::Kind::PlusInf: return "+inf";
        case LimitValue::Kind::MinusInf: return "-inf";
        case LimitValue::Kind::UnsignedInf: return "inf (unsigned)";
        case LimitValue::Kind::None: return "none";
    }
    return "?";
}

Verdict Verdict::both(const Verdict& a, const Verdict& b) {
    auto weight = [](Status s) {
        return s == Status::Fails ? 0 : (s == Status::Inconclusive ? 1 : 2);
    };
    const Verdict& weak = weight(a.status) <= weight(b.status) ? a : b;
    Verdict out = weak;
    out.mode = (a.mode == Mode::Exact && b.mode == Mode::Exact) ? Mode::Exact : Mode::Numeric;
    out.confidence = std::min(a.confidence, b.confidence);
    if (!a.note.empty() && !b.note.empty() && a.note != b.note)
        out.note = a.note + " / " + b.note;
    else if (out.note.empty())
        out.note = a.note.empty() ? b.note : a.note;
    return out;
}

} // namespace agcal
