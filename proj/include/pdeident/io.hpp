#ifndef PDEIDENT_IO_HPP
#define PDEIDENT_IO_HPP

#include "pdeident/classify.hpp"
#include "pdeident/elliptic.hpp"
#include "pdeident/infer.hpp"
#include "pdeident/operators.hpp"
#include "pdeident/solve.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pdeident {

/// All CSV output is UTF-8, comma separated, '.' decimal point, LF line
/// endings, mandatory header row, numbers at 17 significant digits.
std::string format_double(double v);

/// Header "n,lambda,multiplicity,positive".
void write_eigen_csv(std::ostream &os, const std::vector<EigenPair> &pairs);

/// Header "x,t,u" (or "x,t,u,v" with a second field); row-major by t, then x.
void write_field_csv(std::ostream &os, const Field &u, const Field *v = nullptr);

/// Header "x,t,y"; row-major by t, then x.
void write_dataset_csv(std::ostream &os, const Dataset &data);

/// Header "n,d,b,c,positive".
void write_aset_csv(std::ostream &os, const std::vector<ASetSample> &samples);

/// Header "c,d,loglik,in95"; row-major by c, then d.
void write_profile_csv(std::ostream &os, const ProfileSurface &surf);

/// Header "x,psi".
void write_elliptic_profile_csv(std::ostream &os, const EllipticProfile &profile);

std::string classification_json(const PairClassification &cls);
std::string mle_json(const ProfileSurface &surf);
std::string elliptic_json(const EllipticClassification &cls);
std::string nonlinear_verdict_json(const NonlinearPairVerdict &verdict);
std::string construction_json(const NonIdentifiableSolution &sol);
std::string system_construction_json(const TwoSpeciesConstruction &sys);

} // namespace pdeident

#endif // PDEIDENT_IO_HPP
