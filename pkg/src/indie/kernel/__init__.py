"""The proof kernel: expressions, declarations, reduction, typechecking and
inductive-type machinery."""

from .decl import (
    Constructor,
    Declaration,
    InductiveDecl,
    Telescope,
    TelescopeEntry,
    Transparency,
    telescope_lams,
    telescope_pis,
)
from .env import Environment, KernelError, RecursorInfo, TypeError_, UnknownDeclaration
from .expr import (
    App,
    BoundVar,
    Const,
    Expr,
    FreeVar,
    Lambda,
    Meta,
    Pi,
    SORT,
    Sort,
    abstract_fvar,
    fvars,
    has_fvar,
    has_meta,
    instantiate,
    instantiate_all,
    lift,
    locally_closed,
    metas,
    mk_app,
    subst_fvar,
    subst_fvars,
    unfold_app,
)
from .inductive import (
    NestedOrMutualError,
    ParameterMismatchError,
    PositivityError,
    declare_inductive,
    generate_recursor,
    generate_support,
    validate_inductive,
)
from .reduce import is_def_eq, whnf
from .typecheck import check_declaration, check_type, infer_type

__all__ = [name for name in dir() if not name.startswith("_")]
