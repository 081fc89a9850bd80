#include "ers/v2i.hpp"

#include "ers/errors.hpp"
#include "ers/sha256.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace ers {

// ---------------------------------------------------------------------------
// SessionBook

std::variant<SessionGrant, SessionDeny> SessionBook::open_session(
    const SessionRequest& req, double now_s) {
  if (open_by_vehicle_.count(req.vehicle_id)) {
    throw SimError(ErrorCode::DuplicateSession,
                   "vehicle " + std::to_string(req.vehicle_id) +
                       " already has an open session");
  }
  if (req.soc >= soc_ceiling_) {
    return SessionDeny{DenyReason::NotNeeded};
  }
  ChargingSession s;
  s.session_id = "s" + std::to_string(next_id_++);
  s.vehicle_id = req.vehicle_id;
  s.tariff_id = tariff_id_;
  s.opened_s = now_s;
  by_id_[s.session_id] = sessions_.size();
  open_by_vehicle_[req.vehicle_id] = sessions_.size();
  sessions_.push_back(s);
  return SessionGrant{s.session_id, s.tariff_id};
}

void SessionBook::add_telemetry(const std::string& session_id,
                                std::int64_t milli_kwh) {
  if (milli_kwh < 0) {
    throw SimError(ErrorCode::NegativeKwh, "telemetry kwh must be >= 0");
  }
  auto it = by_id_.find(session_id);
  if (it == by_id_.end()) {
    throw SimError(ErrorCode::SessionClosed, "unknown session " + session_id);
  }
  ChargingSession& s = sessions_[it->second];
  if (s.state != SessionState::Open) {
    throw SimError(ErrorCode::SessionClosed, session_id + " is not open");
  }
  s.accumulated_milli_kwh += milli_kwh;
}

void SessionBook::close_session(const std::string& session_id, double now_s) {
  auto it = by_id_.find(session_id);
  if (it == by_id_.end()) return;
  ChargingSession& s = sessions_[it->second];
  if (s.state != SessionState::Open) return;
  s.state = SessionState::Closed;
  s.closed_s = now_s;
  open_by_vehicle_.erase(s.vehicle_id);
}

const ChargingSession* SessionBook::find(const std::string& session_id) const {
  auto it = by_id_.find(session_id);
  return it == by_id_.end() ? nullptr : &sessions_[it->second];
}

std::size_t SessionBook::open_count() const { return open_by_vehicle_.size(); }

// ---------------------------------------------------------------------------
// Ledger

std::string format_kwh_3dp(std::int64_t milli_kwh) {
  bool neg = milli_kwh < 0;
  std::int64_t v = neg ? -milli_kwh : milli_kwh;
  std::string frac = std::to_string(v % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return (neg ? "-" : "") + std::to_string(v / 1000) + "." + frac;
}

std::string ledger_canonical(const LedgerEntry& e, bool include_hash) {
  // Keys in lexicographic order; no whitespace.
  std::ostringstream os;
  os << '{';
  if (include_hash) os << "\"hash\":\"" << e.hash << "\",";
  os << "\"index\":" << e.index << ",\"kwh\":\"" << e.kwh << "\",\"prev_hash\":\""
     << e.prev_hash << "\",\"segment\":" << e.segment_id << ",\"session\":\""
     << e.session_id << "\",\"tariff\":\"" << e.tariff_id
     << "\",\"timestamp_ms\":" << e.timestamp_ms << '}';
  return os.str();
}

namespace {
const std::string kGenesisHash(64, '0');
} // namespace

const LedgerEntry& Ledger::append(std::int64_t timestamp_ms,
                                  const std::string& session_id, int segment_id,
                                  std::int64_t milli_kwh,
                                  const std::string& tariff_id) {
  if (milli_kwh < 0) {
    throw SimError(ErrorCode::NegativeKwh, "ledger kwh must be >= 0");
  }
  LedgerEntry e;
  e.index = static_cast<std::int64_t>(entries_.size());
  e.timestamp_ms = timestamp_ms;
  e.session_id = session_id;
  e.segment_id = segment_id;
  e.kwh = format_kwh_3dp(milli_kwh);
  e.tariff_id = tariff_id;
  e.prev_hash = entries_.empty() ? kGenesisHash : entries_.back().hash;
  e.hash = sha256_hex(ledger_canonical(e, false));
  entries_.push_back(std::move(e));
  return entries_.back();
}

LedgerVerification Ledger::verify() const {
  std::string prev = kGenesisHash;
  for (const auto& e : entries_) {
    if (e.prev_hash != prev || e.hash != sha256_hex(ledger_canonical(e, false))) {
      return {false, e.index};
    }
    prev = e.hash;
  }
  return {true, -1};
}

std::string Ledger::to_jsonl() const {
  std::string out;
  for (const auto& e : entries_) {
    out += ledger_canonical(e, true);
    out += '\n';
  }
  return out;
}

LedgerVerification Ledger::verify_jsonl(const std::string& text) {
  std::string prev = kGenesisHash;
  std::int64_t index = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos
                                                                : nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    if (line.empty()) continue;

    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return {false, index};

    LedgerEntry e;
    try {
      e.index = j.at("index").get<std::int64_t>();
      e.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
      e.session_id = j.at("session").get<std::string>();
      e.segment_id = j.at("segment").get<int>();
      e.kwh = j.at("kwh").get<std::string>();
      e.tariff_id = j.at("tariff").get<std::string>();
      e.prev_hash = j.at("prev_hash").get<std::string>();
      e.hash = j.at("hash").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      return {false, index};
    }
    // Any cosmetic deviation from canonical bytes is tampering too.
    if (ledger_canonical(e, true) != line) return {false, index};
    if (e.index != index || e.prev_hash != prev ||
        e.hash != sha256_hex(ledger_canonical(e, false))) {
      return {false, index};
    }
    prev = e.hash;
    ++index;
  }
  return {true, -1};
}

// ---------------------------------------------------------------------------
// Anomaly detection

std::vector<Alert> detect_anomalies(const WindowObservation& obs,
                                    const AnomalyParams& p) {
  std::vector<Alert> alerts;
  double mismatch = std::abs(obs.metered_kwh - obs.telemetry_kwh);
  double tol = std::max(p.mismatch_abs_kwh, p.mismatch_rel * obs.metered_kwh);
  if (mismatch > tol) {
    alerts.push_back(
        {AlertKind::EnergyMismatch, obs.segment_id, obs.window_start_s, mismatch});
  }
  if (obs.metered_kwh > 0.0 && !obs.session_mapped) {
    alerts.push_back({AlertKind::UnauthorizedDraw, obs.segment_id,
                      obs.window_start_s, obs.metered_kwh});
  }
  return alerts;
}

std::optional<Alert> MaintenanceWatch::observe(int segment_id,
                                               double window_start_s,
                                               double tx_kwh,
                                               double delivered_kwh) {
  if (tx_kwh < params_.min_ratio_tx_kwh) return std::nullopt;
  double ratio = delivered_kwh / tx_kwh;
  State& st = states_[segment_id];
  if (st.baseline < 0.0) {
    st.baseline = ratio;
    return std::nullopt;
  }
  if (ratio < st.baseline * (1.0 - params_.maintenance_drop)) {
    st.consecutive += 1;
    if (st.consecutive >= params_.maintenance_windows && !st.alerted) {
      st.alerted = true;
      return Alert{AlertKind::Maintenance, segment_id, window_start_s,
                   st.baseline - ratio};
    }
    return std::nullopt;
  }
  // Healthy window: recover and keep slowly tracking the long-run ratio.
  st.consecutive = 0;
  st.alerted = false;
  st.baseline += params_.baseline_ewma * (ratio - st.baseline);
  return std::nullopt;
}

} // namespace ers
