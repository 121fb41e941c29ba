export {
  RotboxClient,
  RotboxServiceError,
} from "./client.js";
export type {
  BatchLossResult,
  BoxRow,
  PenaltyConfig,
  VersionInfo,
} from "./client.js";
