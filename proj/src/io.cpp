#include "pdeident/io.hpp"

#include "pdeident/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>

namespace pdeident {

namespace {

using nlohmann::json;

json params_json(const OperatorParams &p) {
    return json{{"d", p.d}, {"b", p.b}, {"c", p.c}};
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_eigen_csv(std::ostream &os, const std::vector<EigenPair> &pairs) {
    os << "n,lambda,multiplicity,positive\n";
    for (const auto &p : pairs)
        os << p.n << ',' << format_double(p.lambda) << ',' << p.multiplicity << ','
           << (p.positive ? 1 : 0) << '\n';
}

void write_field_csv(std::ostream &os, const Field &u, const Field *v) {
    if (v && (v->x != u.x || v->t != u.t))
        throw GridMismatch("component fields live on different grids");
    os << (v ? "x,t,u,v\n" : "x,t,u\n");
    for (size_t j = 0; j < u.t.size(); ++j)
        for (size_t i = 0; i < u.x.size(); ++i) {
            os << format_double(u.x[i]) << ',' << format_double(u.t[j]) << ','
               << format_double(u.values(static_cast<int>(i), static_cast<int>(j)));
            if (v)
                os << ',' << format_double(v->values(static_cast<int>(i), static_cast<int>(j)));
            os << '\n';
        }
}

void write_dataset_csv(std::ostream &os, const Dataset &data) {
    os << "x,t,y\n";
    for (size_t j = 0; j < data.t_obs.size(); ++j)
        for (size_t i = 0; i < data.x_obs.size(); ++i)
            os << format_double(data.x_obs[i]) << ',' << format_double(data.t_obs[j]) << ','
               << format_double(data.y(static_cast<int>(i), static_cast<int>(j))) << '\n';
}

void write_aset_csv(std::ostream &os, const std::vector<ASetSample> &samples) {
    os << "n,d,b,c,positive\n";
    for (const auto &s : samples)
        os << s.n << ',' << format_double(s.d) << ',' << format_double(s.b) << ','
           << format_double(s.c) << ',' << (s.positive ? 1 : 0) << '\n';
}

void write_profile_csv(std::ostream &os, const ProfileSurface &surf) {
    os << "c,d,loglik,in95\n";
    for (size_t i = 0; i < surf.c_grid.size(); ++i)
        for (size_t j = 0; j < surf.d_grid.size(); ++j)
            os << format_double(surf.c_grid[i]) << ',' << format_double(surf.d_grid[j]) << ','
               << format_double(surf.loglik(static_cast<int>(i), static_cast<int>(j))) << ','
               << surf.in95(static_cast<int>(i), static_cast<int>(j)) << '\n';
}

void write_elliptic_profile_csv(std::ostream &os, const EllipticProfile &profile) {
    os << "x,psi\n";
    for (size_t i = 0; i < profile.x.size(); ++i)
        os << format_double(profile.x[i]) << ',' << format_double(profile.psi[i]) << '\n';
}

std::string classification_json(const PairClassification &cls) {
    json j;
    j["verdict"] = to_string(cls.verdict);
    j["a1"] = params_json(cls.a1);
    j["a2"] = params_json(cls.a2);
    j["auxiliary"] = params_json(cls.auxiliary);
    j["notes"] = cls.notes;
    if (cls.witness) {
        j["witness"] = {{"n", cls.witness->n},
                        {"lambda", cls.witness->lambda},
                        {"multiplicity", cls.witness->multiplicity},
                        {"positive", cls.witness->positive}};
    } else {
        j["witness"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string mle_json(const ProfileSurface &surf) {
    json j;
    j["c"] = surf.mle.c;
    j["d"] = surf.mle.d;
    std::vector<double> coeffs(surf.mle.coeffs.data(),
                               surf.mle.coeffs.data() + surf.mle.coeffs.size());
    j["C"] = coeffs;
    j["loglik"] = surf.mle.loglik;
    j["threshold"] = surf.threshold;
    j["sigma"] = surf.mle.sigma;
    j["eta"] = surf.mle.eta;
    j["ill_conditioned_nodes"] = surf.ill_conditioned.size();
    return j.dump(2) + "\n";
}

std::string elliptic_json(const EllipticClassification &cls) {
    json j;
    j["regime"] = to_string(cls.regime);
    j["n_solutions"] = cls.solutions.size();
    json shots = json::array();
    for (const auto &p : cls.solutions)
        shots.push_back(p.shoot_param);
    j["shoot_params"] = shots;
    j["notes"] = cls.notes;
    return j.dump(2) + "\n";
}

std::string nonlinear_verdict_json(const NonlinearPairVerdict &verdict) {
    json j;
    j["identifiable"] = verdict.identifiable;
    j["regime"] = to_string(verdict.regime);
    j["n_difference_solutions"] = verdict.difference.solutions.size();
    j["notes"] = verdict.notes;
    return j.dump(2) + "\n";
}

std::string construction_json(const NonIdentifiableSolution &sol) {
    json j;
    j["mode"] = {{"n", sol.mode.n},
                 {"lambda", sol.mode.lambda},
                 {"multiplicity", sol.mode.multiplicity}};
    j["growth_rate"] = sol.growth_rate;
    j["amplitude"] = sol.amplitude;
    j["amplitude2"] = sol.amplitude2;
    j["positive"] = sol.positive;
    j["a1"] = params_json(sol.params_pair.first);
    j["a2"] = params_json(sol.params_pair.second);
    return j.dump(2) + "\n";
}

std::string system_construction_json(const TwoSpeciesConstruction &sys) {
    json j;
    j["params"] = {{"d_u", sys.params.d_u}, {"d_v", sys.params.d_v},
                   {"a11", sys.params.a11}, {"a12", sys.params.a12},
                   {"a21", sys.params.a21}, {"a22", sys.params.a22}};
    j["kappa_u"] = sys.kappa_u;
    j["kappa_v"] = sys.kappa_v;
    j["delta1"] = sys.delta1;
    j["delta2"] = sys.delta2;
    j["growth_rate"] = sys.scalar.growth_rate;
    j["mode_n"] = sys.scalar.mode.n;
    return j.dump(2) + "\n";
}

} // namespace pdeident
