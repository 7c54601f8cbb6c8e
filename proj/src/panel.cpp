#include "liqrec/panel.hpp"

#include "liqrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace liqrec {

MarketPanel::MarketPanel(std::vector<Date> dates) : dates_(std::move(dates)) {}

void MarketPanel::set_column(const std::string& name, std::vector<double> values) {
    if (values.size() != dates_.size())
        throw DataError("column '" + name + "' has " + std::to_string(values.size()) +
                        " values for " + std::to_string(dates_.size()) + " dates");
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it != names_.end()) {
        columns_[static_cast<std::size_t>(it - names_.begin())] = std::move(values);
        return;
    }
    names_.push_back(name);
    columns_.push_back(std::move(values));
}

bool MarketPanel::has_column(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& MarketPanel::column(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw DataError("panel has no column '" + name + "'");
    return columns_[static_cast<std::size_t>(it - names_.begin())];
}

std::optional<std::size_t> MarketPanel::row_of(Date d) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
    if (it == dates_.end() || *it != d) return std::nullopt;
    return static_cast<std::size_t>(it - dates_.begin());
}

void MarketPanel::validate_aligned() const {
    for (std::size_t i = 1; i < dates_.size(); ++i)
        if (!(dates_[i - 1] < dates_[i]))
            throw DataError("panel dates not strictly increasing at " + dates_[i].iso());
    for (std::size_t c = 0; c < names_.size(); ++c)
        for (std::size_t i = 0; i < dates_.size(); ++i)
            if (!std::isfinite(columns_[c][i]))
                throw DataError("panel column '" + names_[c] + "' missing on " + dates_[i].iso());
}

std::string to_string(Session s) {
    switch (s) {
        case Session::regular: return "regular";
        case Session::after_hours: return "after_hours";
        case Session::weekend: return "weekend";
    }
    return "regular";
}

std::optional<Session> parse_session(const std::string& s) {
    if (s.empty() || s == "regular") return Session::regular;
    if (s == "after_hours") return Session::after_hours;
    if (s == "weekend") return Session::weekend;
    return std::nullopt;
}

std::vector<Date> EventCatalog::dates() const {
    std::vector<Date> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(e.date);
    return out;
}

void EventCatalog::validate() const {
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (i > 0 && e.date < events[i - 1].date)
            throw DataError("event catalog not sorted by date at " + e.date.iso());
        if (!(e.loss_usd > 0.0)) throw DataError("event on " + e.date.iso() + " has non-positive loss");
        if (!(e.tvl_usd > 0.0)) throw DataError("event on " + e.date.iso() + " has non-positive TVL");
        if (e.loss_usd > e.tvl_usd)
            throw DataError("event on " + e.date.iso() + " (" + e.protocol + "): loss exceeds TVL");
        if (e.gas_gwei < 0.0) throw DataError("event on " + e.date.iso() + " has negative gas");
    }
}

namespace {

const std::vector<double>& named(const std::vector<std::string>& names,
                                 const std::vector<std::vector<double>>& cols, const std::string& name,
                                 const char* what) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DataError(std::string("stacked panel has no ") + what + " '" + name + "'");
    return cols[static_cast<std::size_t>(it - names.begin())];
}

}  // namespace

const std::vector<double>& StackedPanel::control(const std::string& name) const {
    return named(control_names, controls, name, "control");
}

const std::vector<double>& StackedPanel::attribute(const std::string& name) const {
    return named(attribute_names, attributes, name, "attribute");
}

bool StackedPanel::has_attribute(const std::string& name) const {
    return std::find(attribute_names.begin(), attribute_names.end(), name) != attribute_names.end();
}

std::vector<int> StackedPanel::distinct_events() const {
    std::set<int> s(event_id.begin(), event_id.end());
    return {s.begin(), s.end()};
}

std::string month_label(int month_index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", month_index / 12, month_index % 12 + 1);
    return buf;
}

}  // namespace liqrec
