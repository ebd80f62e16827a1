// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace srforge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SRFORGE_ERROR(Name)                    \
    class Name : public Error {                \
    public:                                    \
        explicit Name(const std::string& msg)  \
            : Error(#Name ": " + msg) {}       \
    }

SRFORGE_ERROR(MalformedSequence);
SRFORGE_ERROR(ParseFailure);
SRFORGE_ERROR(ConstantCountMismatch);
SRFORGE_ERROR(BudgetExhausted);
SRFORGE_ERROR(DomainUnsatisfiable);
SRFORGE_ERROR(UnsupportedDomain);
SRFORGE_ERROR(InconsistentParams);
SRFORGE_ERROR(AllRestartsFaulted);
SRFORGE_ERROR(ZeroVariance);
SRFORGE_ERROR(UnknownSuite);
SRFORGE_ERROR(IoFailure);
SRFORGE_ERROR(ConfigError);

#undef SRFORGE_ERROR

} // namespace srforge
