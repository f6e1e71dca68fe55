#ifndef LAMBSHIFT_VERSION_HPP
#define LAMBSHIFT_VERSION_HPP

namespace lambshift {

inline constexpr const char* version = "1.0.0";
inline constexpr int manifest_schema_version = 1;

} // namespace lambshift

#endif
