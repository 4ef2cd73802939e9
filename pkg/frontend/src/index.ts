export {
  CliError,
  propagateBatch,
  runCli,
  TleParseError,
  type CliRun,
  type PropagateOptions,
  type TleRecord,
} from "./client.js";
export {
  parseGrid,
  PLANE_NAMES,
  PLANE_ORDER_TAG,
  SGB1_HEADER_BYTES,
  SGB1_MAGIC,
  Sgb1FormatError,
  Sgb1Grid,
  type CellState,
  type FloatPlane,
  type PlaneName,
} from "./sgb1.js";
