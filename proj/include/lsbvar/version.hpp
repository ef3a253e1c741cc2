#ifndef LSBVAR_VERSION_HPP
#define LSBVAR_VERSION_HPP

namespace lsbvar {
inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kStoreFormatVersion = 1;
}  // namespace lsbvar

#endif
