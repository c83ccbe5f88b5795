/** Wire schemas for the floorplan service API, mirrored with zod. */

import { z } from "zod";

export const PointSchema = z.tuple([z.number(), z.number()]);
export type Point = z.infer<typeof PointSchema>;

export const BoundarySchema = z.object({
  vertices: z.array(PointSchema).min(4),
  door: z.tuple([PointSchema, PointSchema]),
  resolution: z.number().int().positive(),
});
export type Boundary = z.infer<typeof BoundarySchema>;

export const RoomNodeSchema = z.object({
  id: z.number().int(),
  type: z.string(),
  cell: z.tuple([z.number().int(), z.number().int()]),
  size_ratio: z.number(),
  size_bin: z.number().int(),
});
export type RoomNode = z.infer<typeof RoomNodeSchema>;

export const GraphEdgeSchema = z.tuple([
  z.number().int(),
  z.number().int(),
  z.string(),
]);
export type GraphEdge = z.infer<typeof GraphEdgeSchema>;

export const LayoutGraphSchema = z.object({
  nodes: z.array(RoomNodeSchema),
  edges: z.array(GraphEdgeSchema),
});
export type LayoutGraph = z.infer<typeof LayoutGraphSchema>;

export const CandidateSchema = z.object({
  record_id: z.string(),
  distance: z.number(),
  graph: LayoutGraphSchema,
  thumbnail: z.array(z.string()),
});
export type Candidate = z.infer<typeof CandidateSchema>;

export const RetrieveResponseSchema = z.object({
  candidates: z.array(CandidateSchema),
});

export const SessionCreatedSchema = z.object({
  session_id: z.string(),
  boundary: BoundarySchema,
});

export const TransferResponseSchema = z.object({
  graph: LayoutGraphSchema,
  rotation: z.number().int(),
  priors: z.array(z.record(z.unknown())),
});

export const EditResponseSchema = z.object({
  graph: LayoutGraphSchema,
});

export const GenerateStatsSchema = z.object({
  n_rooms: z.number().int(),
  n_doors: z.number().int(),
  n_windows: z.number().int(),
  unsatisfied_adjacencies: z.array(z.array(z.number().int())),
  coverage: z.number(),
  overlap_pixels: z.number().int(),
  outside_pixels: z.number().int(),
});
export type GenerateStats = z.infer<typeof GenerateStatsSchema>;

export const GenerateResponseSchema = z.object({
  floorplan: z.record(z.unknown()),
  svg: z.string(),
  boxes: z.array(z.record(z.unknown())),
  loss_trace: z.array(z.record(z.number())),
  final_loss: z.record(z.number()),
  timings: z.record(z.number()),
  stats: GenerateStatsSchema,
});
export type GenerateResponse = z.infer<typeof GenerateResponseSchema>;

export const ApiErrorSchema = z.object({
  error: z.object({
    code: z.string(),
    message: z.string(),
  }),
});

/** Constraint selectors accepted by the retrieve endpoint. */
export const ROOM_SELECTORS = [
  "LivingRoom",
  "Bedroom",
  "MasterRoom",
  "SecondRoom",
  "GuestRoom",
  "ChildRoom",
  "StudyRoom",
  "Kitchen",
  "Bathroom",
  "DiningRoom",
  "Balcony",
  "Storage",
  "Entrance",
  "Wall",
] as const;
export type RoomSelector = (typeof ROOM_SELECTORS)[number];

export interface Constraints {
  room_counts?: Record<string, [number, number]>;
  required_locations?: [string, [number, number]][];
  required_adjacencies?: [string, string][];
}

export type EditCommand =
  | { op: "add_node"; type: string; cell: [number, number]; size_ratio?: number }
  | { op: "delete_node"; node_id: number }
  | { op: "move_node"; node_id: number; cell: [number, number] }
  | { op: "add_edge"; a: number; b: number }
  | { op: "delete_edge"; a: number; b: number };
