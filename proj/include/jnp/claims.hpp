#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "jnp/errors.hpp"
#include "jnp/xreal.hpp"

namespace jnp {

/// Run parameters shared by all claims. Claims that need a smaller
/// construction (brute force, quadrature) cap the depth themselves and say so
/// in their rows.
struct Params {
  double p = 2.0;
  double q = 3.0;
  int depth = 24;
  int refine = 2;
  std::uint64_t seed = 20240601;
  double tol = 1e-9;     // relative, for identities
  double window = 0.2;   // relative, for fitted-constant stability

  /// "p=2;q=3;depth=24;refine=2;seed=20240601".
  std::string describe() const;
  /// Sets one key; unknown keys and unparsable values raise UsageError.
  void set(const std::string& key, const std::string& value);
  /// key=value lines; '#' starts a comment; blank lines are skipped.
  void load(std::istream& is);
  /// Range checks (p > 1, q >= p, 1 <= depth <= 30, ...); raises UsageError.
  void validate() const;
};

struct ClaimReport {
  std::string claim_id;
  std::string param_set;  // run parameters plus row keys such as k=5
  std::int64_t index = 0;
  ExtReal lhs;
  ExtReal rhs;
  double ratio = 0.0;  // lhs / rhs
  bool pass = false;
  std::string note;
};

/// Registered IDs in run order.
const std::vector<std::string>& claim_ids();
/// One-line description of a registered claim.
const std::string& claim_summary(const std::string& id);

/// Rows of one claim; deterministic in (id, params). Unknown IDs raise a
/// UsageError that lists the registered ones.
std::vector<ClaimReport> run_claim(const std::string& id, const Params& params);
/// Several claims, run concurrently; rows come back grouped by claim in the
/// order of `ids`.
std::vector<ClaimReport> run_claims(const std::vector<std::string>& ids, const Params& params);

extern const char* const kCsvHeader;
void write_csv(std::ostream& os, const std::vector<ClaimReport>& rows);
/// Reads rows written by write_csv (the note column is not stored).
std::vector<ClaimReport> read_csv(std::istream& is);

/// Per-claim totals for a human-readable summary.
struct ClaimTally {
  std::string claim_id;
  std::size_t rows = 0;
  std::size_t failed = 0;
};
std::vector<ClaimTally> tally(const std::vector<ClaimReport>& rows);

}  // namespace jnp
