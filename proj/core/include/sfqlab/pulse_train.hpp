#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfq {

/// Timestamped SFQ pulse events per named port. Times are seconds and kept
/// strictly increasing per port.
class PulseTrain {
public:
    void add(const std::string& port, double t) {
        auto& v = events_[port];
        if (!v.empty() && t <= v.back())
            throw std::invalid_argument("PulseTrain: event times must be strictly increasing on '" +
                                        port + "'");
        v.push_back(t);
    }

    const std::vector<double>& events(const std::string& port) const {
        static const std::vector<double> empty;
        auto it = events_.find(port);
        return it == events_.end() ? empty : it->second;
    }

    std::size_t count(const std::string& port) const { return events(port).size(); }
    bool has_port(const std::string& port) const { return events_.count(port) != 0; }
    const std::map<std::string, std::vector<double>>& all() const { return events_; }
    std::size_t total() const {
        std::size_t n = 0;
        for (auto& [k, v] : events_) n += v.size();
        return n;
    }

    /// CSV with header "port,time"; RFC 4180 line endings.
    std::string to_csv() const;
    static PulseTrain from_csv(const std::string& text);

private:
    std::map<std::string, std::vector<double>> events_;
};

}  // namespace sfq
