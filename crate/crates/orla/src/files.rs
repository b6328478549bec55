//! Instance and plan file schemas (JSON). All lengths are meters, all
//! angles radians.

use crate::cost::CostBreakdown;
use crate::geometry::{Grid, Point2};
use crate::model::{
    Action, Arrangement, Instance, ModelError, ObjId, ObjectShape, ObjectState, Plan, Pose,
    Scenario, Support, Table,
};
use serde::{Deserialize, Serialize};

pub const INSTANCE_FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    scenario: String,
    table: TableDto,
    #[serde(rename = "C")]
    c: f64,
    objects: Vec<ObjectDto>,
    initial: Vec<PlacementDto>,
    goal: Vec<PlacementDto>,
}

#[derive(Serialize, Deserialize)]
struct TableDto {
    width: f64,
    depth: f64,
}

#[derive(Serialize, Deserialize)]
struct ObjectDto {
    id: String,
    shape: ShapeDto,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ShapeDto {
    Disc { radius: f64, height: f64 },
    Prism { footprint: Vec<[f64; 2]>, height: f64 },
    Gridded { resolution: f64, mask: Vec<Vec<u8>>, bottom: Vec<Vec<f64>>, height: f64 },
}

#[derive(Serialize, Deserialize)]
struct PlacementDto {
    id: String,
    pose: [f64; 4],
    support: String,
}

#[derive(Serialize, Deserialize)]
struct PlanFileDto {
    instance_id: String,
    planner: String,
    actions: Vec<ActionDto>,
    cost: CostDto,
}

#[derive(Serialize, Deserialize)]
struct ActionDto {
    id: String,
    from: [f64; 4],
    to: [f64; 4],
}

#[derive(Serialize, Deserialize)]
struct CostDto {
    travel: f64,
    manipulation: f64,
    total: f64,
}

fn shape_to_dto(shape: &ObjectShape) -> ShapeDto {
    match shape {
        ObjectShape::Disc { radius, height } => ShapeDto::Disc { radius: *radius, height: *height },
        ObjectShape::Prism { footprint, height } => ShapeDto::Prism {
            footprint: footprint.iter().map(|p| [p.x, p.y]).collect(),
            height: *height,
        },
        ObjectShape::Gridded { resolution, mask, bottom, height } => ShapeDto::Gridded {
            resolution: *resolution,
            mask: (0..mask.rows())
                .map(|r| (0..mask.cols()).map(|c| u8::from(*mask.get(r, c))).collect())
                .collect(),
            bottom: (0..bottom.rows())
                .map(|r| (0..bottom.cols()).map(|c| *bottom.get(r, c)).collect())
                .collect(),
            height: *height,
        },
    }
}

fn shape_from_dto(dto: ShapeDto, id: &str) -> Result<ObjectShape, ModelError> {
    let shape = match dto {
        ShapeDto::Disc { radius, height } => ObjectShape::Disc { radius, height },
        ShapeDto::Prism { footprint, height } => ObjectShape::Prism {
            footprint: footprint.into_iter().map(|[x, y]| Point2::new(x, y)).collect(),
            height,
        },
        ShapeDto::Gridded { resolution, mask, bottom, height } => {
            let mask = Grid::from_rows(mask.into_iter().map(|r| r.into_iter().map(|v| v != 0).collect()).collect())
                .ok_or_else(|| ModelError::Parse(format!("objects[{id}].shape.mask rows differ in length")))?;
            let bottom = Grid::from_rows(bottom)
                .ok_or_else(|| ModelError::Parse(format!("objects[{id}].shape.bottom rows differ in length")))?;
            ObjectShape::Gridded { resolution, mask, bottom, height }
        }
    };
    shape
        .validate()
        .map_err(|e| ModelError::Parse(format!("objects[{id}].shape: {e}")))?;
    Ok(shape)
}

fn arrangement_from_dto(
    placements: Vec<PlacementDto>,
    names: &[String],
    section: &str,
) -> Result<Arrangement, ModelError> {
    let n = names.len();
    let mut states: Vec<Option<ObjectState>> = vec![None; n];
    let mut support = vec![Support::Table; n];
    for p in placements {
        let idx = names
            .iter()
            .position(|x| *x == p.id)
            .ok_or_else(|| ModelError::Parse(format!("{section}: unknown object id {:?}", p.id)))?;
        if states[idx].is_some() {
            return Err(ModelError::Parse(format!("{section}: duplicate placement for {:?}", p.id)));
        }
        let [x, y, z, theta] = p.pose;
        if z < 0.0 {
            return Err(ModelError::Parse(format!("{section}[{}].pose: z must be >= 0", p.id)));
        }
        states[idx] = Some(ObjectState::AtPose(Pose::new(x, y, z, theta)));
        support[idx] = if p.support == "table" {
            Support::Table
        } else {
            let s = names
                .iter()
                .position(|x| *x == p.support)
                .ok_or_else(|| ModelError::Parse(format!("{section}[{}].support: unknown object id {:?}", p.id, p.support)))?;
            Support::On(ObjId(s))
        };
    }
    let mut resolved = Vec::with_capacity(n);
    for (i, st) in states.into_iter().enumerate() {
        match st {
            Some(s) => resolved.push(s),
            None => {
                return Err(ModelError::Parse(format!("{section}: missing pose for object {:?}", names[i])))
            }
        }
    }
    Ok(Arrangement { states: resolved, support })
}

fn arrangement_to_dto(arr: &Arrangement, names: &[String]) -> Vec<PlacementDto> {
    arr.states
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let pose = match st {
                ObjectState::AtPose(p) => [p.x, p.y, p.z, p.theta],
                ObjectState::AtBuffer(_) => unreachable!("serialized arrangements are concrete"),
            };
            PlacementDto {
                id: names[i].clone(),
                pose,
                support: match arr.support[i] {
                    Support::Table => "table".to_string(),
                    Support::On(o) => names[o.0].clone(),
                },
            }
        })
        .collect()
}

/// Parses an instance file, checking schema and referential integrity.
pub fn read_instance(bytes: &[u8]) -> Result<Instance, ModelError> {
    let file: InstanceFile =
        serde_json::from_slice(bytes).map_err(|e| ModelError::Parse(e.to_string()))?;
    if file.version != INSTANCE_FILE_VERSION {
        return Err(ModelError::Parse(format!(
            "version: expected {INSTANCE_FILE_VERSION}, found {}",
            file.version
        )));
    }
    let scenario = match file.scenario.as_str() {
        "EE" => Scenario::Ee,
        "MB" => Scenario::Mb,
        other => return Err(ModelError::Parse(format!("scenario: expected \"EE\" or \"MB\", found {other:?}"))),
    };
    let mut names = Vec::with_capacity(file.objects.len());
    let mut shapes = Vec::with_capacity(file.objects.len());
    for obj in file.objects {
        if names.contains(&obj.id) {
            return Err(ModelError::Parse(format!("objects: duplicate id {:?}", obj.id)));
        }
        if obj.id == "table" {
            return Err(ModelError::Parse("objects: id \"table\" is reserved".into()));
        }
        shapes.push(shape_from_dto(obj.shape, &obj.id)?);
        names.push(obj.id);
    }
    let initial = arrangement_from_dto(file.initial, &names, "initial")?;
    let goal = arrangement_from_dto(file.goal, &names, "goal")?;
    let instance = Instance {
        id: file.id.unwrap_or_else(|| "unnamed".to_string()),
        scenario,
        table: Table { width: file.table.width, depth: file.table.depth },
        manipulation_cost: file.c,
        names,
        shapes,
        initial,
        goal,
    };
    instance.check_structure()?;
    Ok(instance)
}

pub fn write_instance(instance: &Instance) -> Vec<u8> {
    let file = InstanceFile {
        version: INSTANCE_FILE_VERSION,
        id: Some(instance.id.clone()),
        scenario: instance.scenario.as_str().to_string(),
        table: TableDto { width: instance.table.width, depth: instance.table.depth },
        c: instance.manipulation_cost,
        objects: instance
            .names
            .iter()
            .zip(&instance.shapes)
            .map(|(id, shape)| ObjectDto { id: id.clone(), shape: shape_to_dto(shape) })
            .collect(),
        initial: arrangement_to_dto(&instance.initial, &instance.names),
        goal: arrangement_to_dto(&instance.goal, &instance.names),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("instance serialization");
    out.push(b'\n');
    out
}

#[derive(Deserialize)]
struct CatalogEntryDto {
    shape: ShapeDto,
    #[serde(default)]
    stack_on: Option<usize>,
}

/// Shape catalog file: a JSON array of `{shape, stack_on?}` entries.
pub fn read_shape_catalog(
    bytes: &[u8],
) -> Result<Vec<crate::harness::ShapeCatalogEntry>, ModelError> {
    let entries: Vec<CatalogEntryDto> =
        serde_json::from_slice(bytes).map_err(|e| ModelError::Parse(e.to_string()))?;
    entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            Ok(crate::harness::ShapeCatalogEntry {
                shape: shape_from_dto(e.shape, &i.to_string())?,
                stack_on: e.stack_on,
            })
        })
        .collect()
}

/// A plan read from or written to disk, with its claimed cost.
#[derive(Clone, Debug)]
pub struct PlanFile {
    pub instance_id: String,
    pub planner: String,
    pub plan: Plan,
    pub cost: CostBreakdown,
}

pub fn read_plan(bytes: &[u8], instance: &Instance) -> Result<PlanFile, ModelError> {
    let dto: PlanFileDto =
        serde_json::from_slice(bytes).map_err(|e| ModelError::Parse(e.to_string()))?;
    let mut actions = Vec::with_capacity(dto.actions.len());
    for a in dto.actions {
        let object = instance
            .index_of(&a.id)
            .ok_or_else(|| ModelError::Parse(format!("actions: unknown object id {:?}", a.id)))?;
        let [fx, fy, fz, ft] = a.from;
        let [tx, ty, tz, tt] = a.to;
        actions.push(Action {
            object,
            from: Pose::new(fx, fy, fz, ft),
            to: Pose::new(tx, ty, tz, tt),
        });
    }
    Ok(PlanFile {
        instance_id: dto.instance_id,
        planner: dto.planner,
        plan: Plan { actions },
        cost: CostBreakdown::new(dto.cost.travel, dto.cost.manipulation),
    })
}

pub fn write_plan(
    instance: &Instance,
    planner: &str,
    plan: &Plan,
    cost: &CostBreakdown,
) -> Vec<u8> {
    let dto = PlanFileDto {
        instance_id: instance.id.clone(),
        planner: planner.to_string(),
        actions: plan
            .actions
            .iter()
            .map(|a| ActionDto {
                id: instance.name(a.object).to_string(),
                from: [a.from.x, a.from.y, a.from.z, a.from.theta],
                to: [a.to.x, a.to.y, a.to.z, a.to.theta],
            })
            .collect(),
        cost: CostDto { travel: cost.travel, manipulation: cost.manipulation, total: cost.total },
    };
    let mut out = serde_json::to_vec_pretty(&dto).expect("plan serialization");
    out.push(b'\n');
    out
}
