//! Exact arithmetic for paramodular Bessel newforms of Saito-Kurokawa
//! representations of `PGSp(4)` over `Q_p`.

pub mod global;
pub mod laurent;
pub mod localfield;
pub mod orders;
pub mod paramodular;
pub mod sk_factors;
pub mod zeta_engine;

pub use laurent::{q, qi, AmbientParams, LaurentError, LaurentPoly, RationalFn, Sign, Q};
pub use localfield::{
    classify, classify_case, FieldElem, FieldError, QuadCase, QuadElem, QuadExtData,
};
pub use orders::{
    build_lm, build_r, build_rm, dual_lattice, hankel_part, unit_quotient_reps, Lattice2,
    LmLattice, OrderError, PadicMat2,
};
pub use paramodular::{
    coset_reps_em, embed_gamma, hecke_coset_reps, special_element, verify_closure,
    verify_decomposition, verify_em_cosets, CosetFamily, CosetReport, Flavor, GSp4Elem, HeckeDirection, ParamodularError,
    ParamodularGroup, ParamodularSpec, SpecialName,
};
pub use zeta_engine::{
    check_functional_equation, oldform_basis_rank, ps_zeta, raise_level, solve_first_order,
    solve_recursion_r, solve_recursion_u, split_zeta_identity, zeta_polynomial, LevelOp,
    ZetaError, ZetaPolynomial, ZetaProfile,
};
pub use sk_factors::{
    bessel_exists, langlands_factors, minimal_level, newform_profile, oldform_dimension,
    regular_l, Existence, LanglandsFactors, LocalSKData, Member, MinimalLevel, Newform, SkError,
    TauLocalType,
};
pub use global::{
    arch_factor, chi_e, fourier_dirichlet, global_root_number, match_field, ArchFactor,
    GlobalError, GlobalTauData, LocalDichotomy, PacketChoice,
};
