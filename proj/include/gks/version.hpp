#pragma once

#ifndef GKS_VERSION
#define GKS_VERSION "0.0.0"
#endif

namespace gks {

inline const char* version() { return GKS_VERSION; }

}  // namespace gks
