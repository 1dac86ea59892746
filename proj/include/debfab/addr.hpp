#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace debfab {

inline std::string format_ipv4(uint32_t ip) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (ip >> 24) & 0xff, (ip >> 16) & 0xff,
                  (ip >> 8) & 0xff, ip & 0xff);
    return buf;
}

inline std::string format_mac(uint64_t mac) {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x",
                  unsigned((mac >> 40) & 0xff), unsigned((mac >> 32) & 0xff),
                  unsigned((mac >> 24) & 0xff), unsigned((mac >> 16) & 0xff),
                  unsigned((mac >> 8) & 0xff), unsigned(mac & 0xff));
    return buf;
}

}  // namespace debfab
