#pragma once

#include "liqrec/date.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace liqrec {

// Date-indexed table of named numeric columns. Missing values are NaN; the
// aligned panels produced by ingest and datagen contain none.
class MarketPanel {
public:
    MarketPanel() = default;
    explicit MarketPanel(std::vector<Date> dates);

    std::size_t rows() const { return dates_.size(); }
    const std::vector<Date>& dates() const { return dates_; }

    // Adds or replaces a column; length must match rows().
    void set_column(const std::string& name, std::vector<double> values);
    bool has_column(const std::string& name) const;
    // Throws DataError for unknown names.
    const std::vector<double>& column(const std::string& name) const;
    const std::vector<std::string>& column_names() const { return names_; }

    std::optional<std::size_t> row_of(Date d) const;
    // Strictly increasing unique dates and no NaN anywhere.
    void validate_aligned() const;

    friend bool operator==(const MarketPanel&, const MarketPanel&) = default;

private:
    std::vector<Date> dates_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

enum class Session { regular, after_hours, weekend };

std::string to_string(Session s);
std::optional<Session> parse_session(const std::string& s);

struct ExploitEvent {
    Date date;                 // event day t=0 after alignment
    Date occurred;             // date as recorded in the source file
    std::string protocol;
    std::string chain;
    double loss_usd = 0.0;
    double tvl_usd = 0.0;      // protocol TVL on the prior day
    double gas_gwei = 0.0;
    Session session = Session::regular;
    std::optional<Date> disclosure_date;

    friend bool operator==(const ExploitEvent&, const ExploitEvent&) = default;
};

// Sorted by date; loss_usd <= tvl_usd for every entry.
struct EventCatalog {
    std::vector<ExploitEvent> events;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
    std::vector<Date> dates() const;
    // Throws DataError on unsorted dates or loss > TVL.
    void validate() const;

    friend bool operator==(const EventCatalog&, const EventCatalog&) = default;
};

// Long-form event x relative-day table. Row r belongs to event event_id[r]
// (index into the catalog used to build it); rel_day is k.
struct StackedPanel {
    int window_lo = -5;
    int window_hi = 3;
    std::vector<int> event_id;
    std::vector<Date> date;
    std::vector<int> rel_day;
    std::vector<double> outcome;
    // Outcome on the trading day before `date` (NaN when unavailable).
    std::vector<double> outcome_prev;
    std::vector<std::string> control_names;
    std::vector<std::vector<double>> controls;   // one vector per control
    // Event-level attributes broadcast to rows (gas_gwei, loss_usd, log_loss, ...).
    std::vector<std::string> attribute_names;
    std::vector<std::vector<double>> attributes;
    // Optional asset key for asset x day panels; empty for single-asset stacks.
    std::vector<int> asset_id;
    std::vector<int> treat;
    std::vector<std::string> asset_names;
    std::vector<std::string> warnings;

    std::size_t rows() const { return rel_day.size(); }
    std::size_t window_size() const { return static_cast<std::size_t>(window_hi - window_lo + 1); }
    const std::vector<double>& control(const std::string& name) const;
    const std::vector<double>& attribute(const std::string& name) const;
    bool has_attribute(const std::string& name) const;
    std::vector<int> distinct_events() const;
};

struct MonthlyRow {
    int month_index = 0;       // year*12 + month-1
    double spread = 0.0;       // mean over the selected days
    std::optional<double> spread_change;
    bool hack_month = false;
    double pcs = 0.0;          // raw prime CP share
    double pcs_z = 0.0;
    std::vector<double> controls;
    int n_days = 0;
};

struct MonthlyPanel {
    std::vector<std::string> control_names;
    std::vector<MonthlyRow> rows;
    std::vector<std::string> warnings;
};

// One protocol hit on a given day: g = -loss / TVL_{t-1}, weight = S_{t-1}.
struct ProtocolShock {
    std::string protocol;
    double g = 0.0;
    double weight = 0.0;
};

// Cross-section feeding the granular instrument on one day. Active protocols
// without a shock have g = 0 and together hold passive_weight.
struct GivDay {
    Date date;
    std::vector<ProtocolShock> shocks;
    int n_active = 0;
    double passive_weight = 0.0;
};

std::string month_label(int month_index);

}  // namespace liqrec
