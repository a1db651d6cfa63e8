//! The operations circuit evaluation needs from its boxes.

use crate::error::Result;
use crate::label::IndexSet;
use crate::relations::{product_all, CpRelation, Relation};
use crate::routedcpm::RoutedCpm;
use crate::routedmap::RoutedMap;
use crate::spaces::PartitionedSpace;

/// A morphism in a symmetric monoidal setting: sequential and parallel
/// composition, identities and wire permutations.
pub trait Process: Clone + Send + Sync {
    type Obj: Clone + PartialEq + Send + Sync;

    fn dom(&self) -> Self::Obj;
    fn cod(&self) -> Self::Obj;
    /// `next ∘ self`.
    fn then(&self, next: &Self) -> Result<Self>;
    fn tensor(&self, other: &Self) -> Self;
    fn identity(obj: &Self::Obj) -> Self;
    fn permutation(objs: &[Self::Obj], order: &[usize]) -> Self;
    fn tensor_objs(objs: &[Self::Obj]) -> Self::Obj;
}

impl Process for Relation {
    type Obj = IndexSet;

    fn dom(&self) -> IndexSet {
        self.domain().clone()
    }
    fn cod(&self) -> IndexSet {
        self.codomain().clone()
    }
    fn then(&self, next: &Self) -> Result<Self> {
        next.compose(self)
    }
    fn tensor(&self, other: &Self) -> Self {
        self.product(other)
    }
    fn identity(obj: &IndexSet) -> Self {
        Relation::identity(obj)
    }
    fn permutation(objs: &[IndexSet], order: &[usize]) -> Self {
        Relation::permutation(objs, order)
    }
    fn tensor_objs(objs: &[IndexSet]) -> IndexSet {
        product_all(objs)
    }
}

impl Process for CpRelation {
    type Obj = IndexSet;

    fn dom(&self) -> IndexSet {
        self.domain().clone()
    }
    fn cod(&self) -> IndexSet {
        self.codomain().clone()
    }
    fn then(&self, next: &Self) -> Result<Self> {
        next.compose(self)
    }
    fn tensor(&self, other: &Self) -> Self {
        self.product(other)
    }
    fn identity(obj: &IndexSet) -> Self {
        CpRelation::identity(obj)
    }
    fn permutation(objs: &[IndexSet], order: &[usize]) -> Self {
        CpRelation::full_coherence(&Relation::permutation(objs, order))
    }
    fn tensor_objs(objs: &[IndexSet]) -> IndexSet {
        product_all(objs)
    }
}

impl Process for RoutedMap {
    type Obj = PartitionedSpace;

    fn dom(&self) -> PartitionedSpace {
        self.domain().clone()
    }
    fn cod(&self) -> PartitionedSpace {
        self.codomain().clone()
    }
    fn then(&self, next: &Self) -> Result<Self> {
        next.compose(self)
    }
    fn tensor(&self, other: &Self) -> Self {
        RoutedMap::tensor(self, other)
    }
    fn identity(obj: &PartitionedSpace) -> Self {
        RoutedMap::identity(obj)
    }
    fn permutation(objs: &[PartitionedSpace], order: &[usize]) -> Self {
        RoutedMap::permutation(objs, order)
    }
    fn tensor_objs(objs: &[PartitionedSpace]) -> PartitionedSpace {
        PartitionedSpace::tensor_all(objs)
    }
}

impl Process for RoutedCpm {
    type Obj = PartitionedSpace;

    fn dom(&self) -> PartitionedSpace {
        self.domain().clone()
    }
    fn cod(&self) -> PartitionedSpace {
        self.codomain().clone()
    }
    fn then(&self, next: &Self) -> Result<Self> {
        next.compose(self)
    }
    fn tensor(&self, other: &Self) -> Self {
        RoutedCpm::tensor(self, other)
    }
    fn identity(obj: &PartitionedSpace) -> Self {
        RoutedCpm::identity(obj)
    }
    fn permutation(objs: &[PartitionedSpace], order: &[usize]) -> Self {
        RoutedCpm::permutation(objs, order)
    }
    fn tensor_objs(objs: &[PartitionedSpace]) -> PartitionedSpace {
        PartitionedSpace::tensor_all(objs)
    }
}
