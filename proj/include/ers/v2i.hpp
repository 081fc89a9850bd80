#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ers {

// ---------------------------------------------------------------------------
// Session lifecycle

struct SessionRequest {
  int vehicle_id = 0;
  double soc = 0.0;
  double requested_kwh = 0.0;
  std::string auth_token; // carried opaquely; never verified cryptographically
};

struct SessionGrant {
  std::string session_id;
  std::string tariff_id;
};

enum class DenyReason { NotNeeded };

struct SessionDeny {
  DenyReason reason = DenyReason::NotNeeded;
};

enum class SessionState { Open, Closed, Aborted };

struct ChargingSession {
  std::string session_id;
  int vehicle_id = 0;
  std::string tariff_id;
  double opened_s = 0.0;
  double closed_s = -1.0;
  std::int64_t accumulated_milli_kwh = 0; // exact integer Wh metering
  SessionState state = SessionState::Open;
};

/// RSU-side session registry. One open session per vehicle; requests at or
/// above the SoC ceiling are denied NOT_NEEDED.
class SessionBook {
public:
  explicit SessionBook(std::string tariff_id = "std", double soc_ceiling = 0.90)
      : tariff_id_(std::move(tariff_id)), soc_ceiling_(soc_ceiling) {}

  /// Throws DUPLICATE_SESSION if the vehicle already has an open session.
  std::variant<SessionGrant, SessionDeny> open_session(const SessionRequest& req,
                                                       double now_s);

  /// Adds billed energy (integer milli-kWh). Throws SESSION_CLOSED / NEGATIVE_KWH.
  void add_telemetry(const std::string& session_id, std::int64_t milli_kwh);

  void close_session(const std::string& session_id, double now_s);

  const ChargingSession* find(const std::string& session_id) const;
  const std::vector<ChargingSession>& sessions() const { return sessions_; }
  std::size_t open_count() const;

private:
  std::string tariff_id_;
  double soc_ceiling_;
  std::vector<ChargingSession> sessions_;
  std::map<std::string, std::size_t> by_id_;
  std::map<int, std::size_t> open_by_vehicle_;
  std::int64_t next_id_ = 1;
};

// ---------------------------------------------------------------------------
// Hash-chained billing ledger

struct LedgerEntry {
  std::int64_t index = 0;
  std::int64_t timestamp_ms = 0;
  std::string session_id;
  int segment_id = 0;
  std::string kwh; // fixed 3-decimal string
  std::string tariff_id;
  std::string prev_hash; // 64 hex chars; genesis = 64 zeros
  std::string hash;
};

/// Canonical serialization used for hashing: a JSON object with
/// lexicographically sorted keys, no whitespace, kwh as the fixed 3-decimal
/// string. include_hash controls whether the stored hash field is appended
/// (it is for the on-disk line format, not for the hashed payload).
std::string ledger_canonical(const LedgerEntry& e, bool include_hash);

std::string format_kwh_3dp(std::int64_t milli_kwh);

struct LedgerVerification {
  bool ok = true;
  std::int64_t first_bad_index = -1;
};

/// Append-only SHA-256 hash chain over billing records.
class Ledger {
public:
  /// Throws NEGATIVE_KWH on negative energy.
  const LedgerEntry& append(std::int64_t timestamp_ms,
                            const std::string& session_id, int segment_id,
                            std::int64_t milli_kwh,
                            const std::string& tariff_id);

  const std::vector<LedgerEntry>& entries() const { return entries_; }

  /// Recomputes every hash and link; returns the smallest failing index.
  LedgerVerification verify() const;

  /// One canonical line (with hash) per entry.
  std::string to_jsonl() const;

  /// Strict verification of serialized lines: each must parse, re-serialize
  /// canonically byte-for-byte, carry the correct chained prev_hash, and hash
  /// to its stored hash. Returns the first failing line index.
  static LedgerVerification verify_jsonl(const std::string& text);

private:
  std::vector<LedgerEntry> entries_;
};

// ---------------------------------------------------------------------------
// Anomaly detection

enum class AlertKind { UnauthorizedDraw, EnergyMismatch, Maintenance };

inline const char* alert_kind_name(AlertKind k) {
  switch (k) {
    case AlertKind::UnauthorizedDraw: return "UNAUTHORIZED_DRAW";
    case AlertKind::EnergyMismatch: return "ENERGY_MISMATCH";
    case AlertKind::Maintenance: return "MAINTENANCE";
  }
  return "?";
}

struct Alert {
  AlertKind kind = AlertKind::UnauthorizedDraw;
  int segment_id = 0;
  double window_start_s = 0.0;
  double magnitude = 0.0;
};

struct AnomalyParams {
  double mismatch_abs_kwh = 0.01;
  double mismatch_rel = 0.01;
  double maintenance_drop = 0.05;
  int maintenance_windows = 3;
  double baseline_ewma = 0.05;
  double min_ratio_tx_kwh = 1e-3; // windows below this carry no usable ratio
};

/// Per-window observation for one metering unit (segment or RSU zone).
struct WindowObservation {
  int segment_id = 0;
  double window_start_s = 0.0;
  double metered_kwh = 0.0;    // RSU meter, reconciled at telemetry receipt
  double telemetry_kwh = 0.0;  // sum of billed telemetry in the window
  bool session_mapped = false; // an open session drew from this unit
  double tx_kwh = 0.0;         // transmitted, for the efficiency ratio
  double delivered_kwh = 0.0;
};

/// Stateless checks (mismatch, unauthorized) for one window observation.
std::vector<Alert> detect_anomalies(const WindowObservation& obs,
                                    const AnomalyParams& p);

/// Rolling per-segment efficiency watcher for predictive maintenance.
class MaintenanceWatch {
public:
  explicit MaintenanceWatch(const AnomalyParams& p) : params_(p) {}

  /// Feed one window's transmitted/delivered totals; returns an alert when the
  /// ratio has sat >drop below baseline for maintenance_windows consecutive
  /// windows.
  std::optional<Alert> observe(int segment_id, double window_start_s,
                               double tx_kwh, double delivered_kwh);

private:
  struct State {
    double baseline = -1.0;
    int consecutive = 0;
    bool alerted = false;
  };
  AnomalyParams params_;
  std::map<int, State> states_;
};

} // namespace ers
