#pragma once

#include <stdexcept>
#include <string>

namespace eegkan {

// Every failure raised by the library derives from Error so callers can catch
// one type; the concrete subtype names the violated contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EEGKAN_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// dsp
EEGKAN_DEFINE_ERROR(DesignError);
EEGKAN_DEFINE_ERROR(SignalTooShort);
EEGKAN_DEFINE_ERROR(InvalidSegmentation);
EEGKAN_DEFINE_ERROR(EmptyBand);

// dataset
EEGKAN_DEFINE_ERROR(ParseError);
EEGKAN_DEFINE_ERROR(IoError);
EEGKAN_DEFINE_ERROR(UnknownChannel);
EEGKAN_DEFINE_ERROR(EmptyDataset);
EEGKAN_DEFINE_ERROR(InvalidProfile);
EEGKAN_DEFINE_ERROR(TooFewRows);

// nn
EEGKAN_DEFINE_ERROR(DimensionMismatch);
EEGKAN_DEFINE_ERROR(IndexOutOfRange);
EEGKAN_DEFINE_ERROR(StaleCache);
EEGKAN_DEFINE_ERROR(ShapeMismatch);
EEGKAN_DEFINE_ERROR(InvalidEpochs);
EEGKAN_DEFINE_ERROR(InvalidArgument);
EEGKAN_DEFINE_ERROR(Diverged);

// experiment / stats
EEGKAN_DEFINE_ERROR(EmptyResult);
EEGKAN_DEFINE_ERROR(RankDeficient);

#undef EEGKAN_DEFINE_ERROR

}  // namespace eegkan
