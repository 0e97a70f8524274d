#include "skre/messages.hpp"

#include "skre/router.hpp"

namespace skre::proto {

std::string_view kind_name(std::uint8_t kind) {
  switch (static_cast<Kind>(kind)) {
    case Kind::Register: return "register";
    case Kind::Directory: return "directory";
    case Kind::Abort: return "abort";
    case Kind::YgcGarbled: return "ygc-garbled";
    case Kind::YgcEvalInput: return "ygc-eval-input";
    case Kind::YgcBlinded: return "ygc-blinded";
    case Kind::YgcHalfUnblind: return "ygc-half-unblind";
    case Kind::YgcUnblinded: return "ygc-unblinded";
    case Kind::YgcBeta: return "ygc-beta";
    case Kind::YgcMasked: return "ygc-masked";
    case Kind::YgcResult: return "ygc-result";
    case Kind::LinUpload: return "lin-upload";
    case Kind::LinDecReq: return "lin-dec-req";
    case Kind::LinPartialRow: return "lin-partial-row";
    case Kind::LinCombine: return "lin-combine";
    case Kind::LinCtilde: return "lin-ctilde";
    case Kind::LinKre: return "lin-kre";
    case Kind::LinFinalPartial: return "lin-final-partial";
    case Kind::LinFinal: return "lin-final";
    case Kind::DgkUpload: return "dgk-upload";
    case Kind::DgkBits: return "dgk-bits";
    case Kind::DgkReply: return "dgk-reply";
    case Kind::DgkResult: return "dgk-result";
    case Kind::DgkDecReq: return "dgk-dec-req";
    case Kind::DgkPartial: return "dgk-partial";
    case Kind::DgkCombine: return "dgk-combine";
    case Kind::DgkMasked: return "dgk-masked";
    case Kind::DgkFinal: return "dgk-final";
    case Kind::SheUpload: return "she-upload";
    case Kind::SheKre: return "she-kre";
    case Kind::SheFinalPartial: return "she-final-partial";
    case Kind::SheFinal: return "she-final";
  }
  if (kind == net::kRouterErrorKind) return "router-error";
  return "unknown";
}

bool is_control_kind(std::uint8_t kind) {
  return kind == raw(Kind::Register) || kind == raw(Kind::Directory) || kind == raw(Kind::Abort) ||
         kind == net::kRouterErrorKind;
}

}  // namespace skre::proto
