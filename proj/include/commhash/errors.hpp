#pragma once

#include <stdexcept>
#include <string>

namespace commhash {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed, non-canonical, or out-of-group encodings.
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Ciphertext tag did not verify.
class AuthenticationError : public Error {
 public:
  using Error::Error;
};

}  // namespace commhash
