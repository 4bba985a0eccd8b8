#pragma once

#include <stdexcept>
#include <string>

namespace docrebench {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// model
struct ParseError : Error {
    using Error::Error;
};
struct SchemaError : Error {
    using Error::Error;
};
struct IntegrityError : Error {
    using Error::Error;
};

// geometry
struct GeometryError : Error {
    using Error::Error;
};

// metrics
struct EmptyDocumentError : Error {
    using Error::Error;
};

// reconstruct
struct UnknownRegionError : Error {
    using Error::Error;
};

// synth
struct LayoutOverflowError : Error {
    using Error::Error;
};
struct SpecError : Error {
    using Error::Error;
};

// pipeline
struct ConfigError : Error {
    using Error::Error;
};
struct StageSpawnError : Error {
    using Error::Error;
};
struct StageProtocolError : Error {
    using Error::Error;
};
struct StageTimeoutError : Error {
    using Error::Error;
};

}  // namespace docrebench
