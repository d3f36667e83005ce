#pragma once

#include <stdexcept>
#include <string>

namespace refdoc {

// Root of every failure reported by this library. Callers that do not care
// about the precise condition can catch this one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class UnreadableRepo : public Error {
public:
    explicit UnreadableRepo(const std::string& path)
        : Error("repository is not readable: " + path) {}
};

class MalformedJson : public Error {
public:
    explicit MalformedJson(const std::string& detail)
        : Error("malformed JSON input: " + detail) {}
};

class UnknownRefactoringKind : public Error {
public:
    explicit UnknownRefactoringKind(std::string kind)
        : Error("unknown refactoring kind: " + kind), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InsufficientCandidates : public Error {
public:
    explicit InsufficientCandidates(const std::string& constraint)
        : Error("not enough candidate commits after constraint: " + constraint) {}
};

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("corpus contains no documents") {}
};

class EmptyTrainingSet : public Error {
public:
    EmptyTrainingSet() : Error("training set is empty") {}
};

class TooFewPerCategory : public Error {
public:
    explicit TooFewPerCategory(const std::string& detail)
        : Error("too few examples in a category: " + detail) {}
};

class KTooLarge : public Error {
public:
    explicit KTooLarge(const std::string& detail)
        : Error("k exceeds the number of training points: " + detail) {}
};

class FoldTooSmall : public Error {
public:
    explicit FoldTooSmall(const std::string& detail)
        : Error("fold count exceeds smallest category: " + detail) {}
};

class UnsupportedModel : public Error {
public:
    explicit UnsupportedModel(const std::string& detail)
        : Error("operation not supported for this model: " + detail) {}
};

class MalformedTemplate : public Error {
public:
    explicit MalformedTemplate(const std::string& detail)
        : Error("malformed pattern template: " + detail) {}
};

class NotJavaFile : public Error {
public:
    explicit NotJavaFile(const std::string& path)
        : Error("not a .java file: " + path) {}
};

class UnclassifiedPath : public Error {
public:
    explicit UnclassifiedPath(const std::string& path)
        : Error("path could not be classified: " + path) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& detail)
        : Error("I/O failure: " + detail) {}
};

} // namespace refdoc
